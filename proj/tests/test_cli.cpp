#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracdrift/config.hpp"
#include "fracdrift/run.hpp"

using namespace fracdrift;

namespace {

const char* classify_doc =
    "command = classify\n"
    "[params]\n"
    "N = 3\n"
    "s = 0.5\n"
    "alpha = 0.3\n"
    "beta = 1.5\n";

const char* influence_doc =
    "# dichotomy run\n"
    "command = influence\n"
    "seed = 7\n"
    "[params]\n"
    "N = 1\n"
    "s = 0.5\n"
    "sigma = 1.5\n"
    "[scenario]\n"
    "drift = radial_power\n"
    "smoothing = 0.05\n"
    "exterior = zero\n"
    "exterior2 = linear\n"
    "gamma2 = 1\n"
    "L = 10, 20, 40\n"
    "h0 = 0.1\n"
    "T = 0.1\n"
    "dt = 0.1\n"
    "probe = 5\n"
    "[output]\n"
    "prefix = dichotomy\n";

struct Captured {
    int code;
    std::string out;
    std::string err;
};

Captured run_text(const std::string& text, RunOptions opt = {}) {
    if (!opt.out_dir) opt.write_files = false;
    std::ostringstream out, err;
    const int code = run_document(text, opt, out, err);
    return {code, out.str(), err.str()};
}

std::string parse_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("classify prints the case and exits 0") {
    const Captured c = run_text(classify_doc);
    CHECK(c.code == exit_ok);
    CHECK(c.out == "case I\n");
    CHECK(c.err.empty());
}

TEST_CASE("verify-parabolic with lambda = 0 fails with exit 1") {
    const std::string doc = std::string(classify_doc) + "sigma = 0.5\nlambda = 0\n[scenario]\ndrift = envelope\n";
    std::string text = doc;
    text.replace(text.find("classify"), 8, "verify-parabolic");
    const Captured c = run_text(text);
    CHECK(c.code == exit_fail);
    CHECK(c.out.find("FAIL") != std::string::npos);
}

TEST_CASE("out-of-range s exits 2 with a one-line diagnostic") {
    std::string text = classify_doc;
    text.replace(text.find("s = 0.5"), 7, "s = 1.2");
    const Captured c = run_text(text);
    CHECK(c.code == exit_usage);
    CHECK(c.err.find("s must lie in (0,1)") != std::string::npos);
    CHECK(c.err.find('\n') == c.err.size() - 1);
}

TEST_CASE("simulator commands require N = 1") {
    const Captured c = run_text("command = simulate\n[params]\nN = 2\ns = 0.5\n");
    CHECK(c.code == exit_usage);
    CHECK(c.err.find("N must be 1") != std::string::npos);
}

TEST_CASE("numerical failure exits 3") {
    const Captured c = run_text("command = thresholds\n[params]\nN = 1\ns = 0.5\nalpha = 0.99\nbeta = 1\n");
    CHECK(c.code == exit_numerical);
    CHECK(c.err.find("numerical failure") == 0);
}

TEST_CASE("empty document lists the required keys") {
    const std::string e = parse_error("");
    CHECK(e.find("missing required keys") != std::string::npos);
    CHECK(e.find("command") != std::string::npos);
    CHECK(e.find("params.N") != std::string::npos);
    CHECK(e.find("params.s") != std::string::npos);
    CHECK(run_text("").code == exit_usage);
}

TEST_CASE("command-specific required keys") {
    const std::string e = parse_error("command = classify\n[params]\nN = 3\ns = 0.5\n");
    CHECK(e.find("params.beta") != std::string::npos);
    CHECK(parse_error("command = fraclap-eval\n[params]\nN = 3\ns = 0.5\n[scenario]\nprofile = getoor\n").empty());
}

TEST_CASE("duplicate key names both lines") {
    const std::string e = parse_error(std::string(classify_doc) + "beta = 2\n");
    CHECK(e.find("line 7") != std::string::npos);
    CHECK(e.find("duplicate key 'params.beta'") != std::string::npos);
    CHECK(e.find("first set on line 6") != std::string::npos);
}

TEST_CASE("unknown keys, sections and type mismatches are errors") {
    CHECK(parse_error(std::string(classify_doc) + "gamma = 1\n").find("line 7: unknown key 'gamma' in [params]") == 0);
    CHECK(parse_error(std::string(classify_doc) + "[extras]\n").find("unknown section [extras]") != std::string::npos);
    CHECK(parse_error("command = classify\n[params]\nN = 3.5\n").find("N expects an integer") != std::string::npos);
    CHECK(parse_error("command = classify\n[params]\ns = half\n").find("s expects a number") != std::string::npos);
    CHECK(parse_error("command = solve\n").find("expects one of") != std::string::npos);
    CHECK(parse_error("command classify\n").find("expected key = value") != std::string::npos);
    CHECK(parse_error("command = influence\n[scenario]\nL = 10, x\n").find("list of numbers") != std::string::npos);
    CHECK(parse_error("[params\n").find("malformed section") != std::string::npos);
}

TEST_CASE("influence document parses the L sequence and round-trips") {
    const RunConfig cfg = parse_config(influence_doc);
    CHECK(cfg.get_list("scenario.L") == std::vector<double>{10.0, 20.0, 40.0});
    CHECK(cfg.get_int("seed") == 7);
    CHECK(cfg.get_word("scenario.exterior2") == "linear");
    // Defaults come from the schema without being stored.
    CHECK(!cfg.has("params.alpha"));
    CHECK(cfg.get_real("params.alpha") == 0.0);

    const std::string text = serialize_config(cfg);
    const RunConfig again = parse_config(text);
    CHECK(again == cfg);
    CHECK(serialize_config(again) == text);
}

TEST_CASE("round trip preserves doubles bit for bit") {
    RunConfig cfg = parse_config(classify_doc);
    cfg.values["params.beta"] = 0.1 + 0.2;
    cfg.values["params.sigma"] = -1e-300;
    cfg.values["scenario.radii"] = std::vector<double>{1.0 / 3.0, 2.0 / 7.0, 1e17};
    const RunConfig again = parse_config(serialize_config(cfg));
    CHECK(again == cfg);
}

TEST_CASE("every schema default parses and the reference lists every key") {
    RunConfig empty;
    const std::string ref = config_reference();
    for (const auto& f : config_schema()) {
        const std::string name = f.section.empty() ? f.key : f.section + "." + f.key;
        CHECK_MESSAGE(ref.find("  " + f.key + " (") != std::string::npos, name);
        if (f.default_text.empty()) {
            CHECK_THROWS_AS(empty.get_word(name), ConfigError);
            continue;
        }
        switch (f.type) {
            case FieldType::integer: CHECK_NOTHROW(empty.get_int(name)); break;
            case FieldType::real: CHECK_NOTHROW(empty.get_real(name)); break;
            case FieldType::real_list: CHECK_NOTHROW(empty.get_list(name)); break;
            case FieldType::word: CHECK_NOTHROW(empty.get_word(name)); break;
        }
    }
}

TEST_CASE("identical configs write byte-identical artifacts") {
    const auto base = std::filesystem::temp_directory_path() / "fracdrift_test_cli";
    std::filesystem::remove_all(base);
    RunOptions a, b;
    a.out_dir = (base / "a").string();
    b.out_dir = (base / "b").string();
    a.seed = 11;
    b.seed = 11;
    const Captured ca = run_text(influence_doc, a);
    const Captured cb = run_text(influence_doc, b);
    REQUIRE(ca.code == exit_ok);
    REQUIRE(cb.code == exit_ok);
    const std::string csv = slurp(base / "a" / "dichotomy.csv");
    CHECK(csv.rfind("L,d,regime\n", 0) == 0);
    CHECK(csv == slurp(base / "b" / "dichotomy.csv"));
    const std::string report = slurp(base / "a" / "dichotomy_report.txt");
    CHECK(report == slurp(base / "b" / "dichotomy_report.txt"));
    CHECK(report.find("seed = 11\n") != std::string::npos);
    CHECK(csv.find('\r') == std::string::npos);
    std::filesystem::remove_all(base);
}

TEST_CASE("verbose prints the full report") {
    RunOptions opt;
    opt.verbose = true;
    const Captured c = run_text(classify_doc, opt);
    CHECK(c.out.find("command = classify\n") == 0);
    CHECK(c.out.find("case = I\n") != std::string::npos);
}

TEST_CASE("fraclap-eval reports closed form against quadrature") {
    const Captured c = run_text("command = fraclap-eval\n[params]\nN = 3\ns = 0.75\nbeta = 1\n");
    CHECK(c.code == exit_ok);
    CHECK(c.out.find("psi_beta: max relative difference") == 0);
}

TEST_CASE("verify-barrier needs an outward drift") {
    const Captured ok = run_text("command = verify-barrier\n[params]\nN = 1\ns = 0.5\nsigma = 1.5\n");
    CHECK(ok.code == exit_ok);
    const Captured in = run_text("command = verify-barrier\n[params]\nN = 1\ns = 0.5\nsigma = 1.5\nK = -1\n");
    CHECK(in.code == exit_usage);
}
