// Command-line front end: Monte Carlo fluctuation runs, exact small-N
// checks, cumulant scans, and the zero-pairing classification.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fluctmat/dft_gauss.hpp"
#include "fluctmat/fluctuation.hpp"

using namespace fluctmat;

namespace {

struct CliOptions {
    std::string case_name = "1";
    int m1 = 1;
    int m2 = 1;
    std::string n_grid = "32,64,128";
    long samples = 20000;
    std::uint64_t seed = 1;
    std::string out;
    std::string d_matrix;
    std::string d_matrix2;
    std::string d_kind = "diag";
    std::string d_pattern = "1,-1";
    std::string poly = "0,1";
    int workers = 1;
    double tolerance_sigmas = 4.0;
    double drift_constant = -1.0;
    int order = 3;
    int exact_n = 3;
};

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw ConfigParseError("empty list: " + text);
    return out;
}

std::vector<int> parse_ints(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_doubles(text)) out.push_back(static_cast<int>(v));
    return out;
}

// flat key=value file; lines starting with '#' are comments
void apply_config_file(const std::string& path, CliOptions& opt) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigParseError("bad config line: " + line);
        auto trim = [](std::string s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
            return s;
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto take = [&](const char* key, auto& field) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        std::stringstream ss(it->second);
        ss >> field;
        if (ss.fail()) throw ConfigParseError(std::string("bad value for ") + key + ": " + it->second);
        kv.erase(it);
    };
    auto take_string = [&](const char* key, std::string& field) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        field = it->second;
        kv.erase(it);
    };
    take_string("case", opt.case_name);
    take("m1", opt.m1);
    take("m2", opt.m2);
    take_string("n-grid", opt.n_grid);
    take("samples", opt.samples);
    take("seed", opt.seed);
    take_string("out", opt.out);
    take_string("d-matrix", opt.d_matrix);
    take_string("d-matrix2", opt.d_matrix2);
    take_string("d-kind", opt.d_kind);
    take_string("d-pattern", opt.d_pattern);
    take_string("poly", opt.poly);
    take("workers", opt.workers);
    take("tolerance-sigmas", opt.tolerance_sigmas);
    take("drift-constant", opt.drift_constant);
    take("order", opt.order);
    take("n", opt.exact_n);
    if (!kv.empty()) throw ConfigParseError("unknown config key: " + kv.begin()->first);
}

EnsembleSpec spec_from(const CliOptions& opt) {
    EnsembleSpec spec = EnsembleSpec::basic(case_from_name(opt.case_name), opt.m1, opt.m2);
    auto family = [&](const std::string& matrix_path) {
        if (!matrix_path.empty()) return DeterministicFamily::load(matrix_path);
        std::vector<double> pattern = parse_doubles(opt.d_pattern);
        if (opt.d_kind == "diag") return DeterministicFamily::diagonal(pattern);
        if (opt.d_kind == "rotated") return DeterministicFamily::rotated(pattern);
        throw ConfigParseError("unknown d-kind: " + opt.d_kind);
    };
    spec.d1 = family(opt.d_matrix);
    spec.d2 = family(opt.d_matrix2.empty() ? opt.d_matrix : opt.d_matrix2);
    Polynomial p{parse_doubles(opt.poly)};
    spec.p.assign(2 * opt.m1, p);
    spec.q.assign(2 * opt.m2, p);
    return spec;
}

ExperimentConfig config_from(const CliOptions& opt) {
    ExperimentConfig config;
    config.spec = spec_from(opt);
    config.n_grid = parse_ints(opt.n_grid);
    config.samples = opt.samples;
    config.master_seed = opt.seed;
    config.tolerance_sigmas = opt.tolerance_sigmas;
    config.drift_constant = opt.drift_constant;
    config.workers = opt.workers;
    return config;
}

void add_common_options(CLI::App* cmd, CliOptions& opt, std::string& config_path) {
    cmd->add_option("--config", config_path, "flat key=value config file; flags override it");
    cmd->add_option("--case", opt.case_name, "conjugator case: 1, 2, 3, or haar");
    cmd->add_option("--m1", opt.m1, "half-length of the first trace product");
    cmd->add_option("--m2", opt.m2, "half-length of the second trace product");
    cmd->add_option("--n-grid", opt.n_grid, "comma-separated matrix sizes");
    cmd->add_option("--samples", opt.samples, "Monte Carlo samples per size");
    cmd->add_option("--seed", opt.seed, "master seed");
    cmd->add_option("--out", opt.out, "CSV output path");
    cmd->add_option("--d-matrix", opt.d_matrix, "explicit matrix file for both families");
    cmd->add_option("--d-matrix2", opt.d_matrix2, "explicit matrix file for the second family");
    cmd->add_option("--d-kind", opt.d_kind, "built-in family: diag or rotated");
    cmd->add_option("--d-pattern", opt.d_pattern, "spectrum pattern, cycled to length N");
    cmd->add_option("--poly", opt.poly, "polynomial coefficients c0,c1,...");
    cmd->add_option("--workers", opt.workers, "worker threads");
    cmd->add_option("--tolerance-sigmas", opt.tolerance_sigmas, "sigmas allowed on the Monte Carlo side");
    cmd->add_option("--drift-constant", opt.drift_constant, "N^-1/2 drift coefficient (<0: from norms)");
}

int run_verify(const CliOptions& opt) {
    ExperimentConfig config = config_from(opt);
    FluctuationReport report = run_experiment(config);
    std::printf("case=%s m1=%d m2=%d samples=%ld seed=%llu (%.1f s)\n",
                case_name(report.conjugator).c_str(), report.m1, report.m2, report.samples,
                static_cast<unsigned long long>(report.seed), report.wall_seconds);
    for (const auto& row : report.rows)
        std::printf("  N=%-5d mc=(% .6f,% .6f) se=%.6f analytic=(% .6f,% .6f) |err|=%.6f tol=%.6f %s\n",
                    row.n, row.mc.value.real(), row.mc.value.imag(), row.mc.std_error,
                    row.analytic.real(), row.analytic.imag(), row.abs_err, row.tolerance,
                    row.pass ? "pass" : "FAIL");
    if (!opt.out.empty()) write_report_csv(report, opt.out);
    return report.all_pass() ? 0 : 1;
}

int run_exact_check(const CliOptions& opt) {
    EnsembleSpec spec = spec_from(opt);
    double residual = exact_cov_decomposition_check(spec, opt.exact_n);
    bool pass = residual <= 1e-10;
    std::printf("case=%s N=%d residual=%.3e %s\n", opt.case_name.c_str(), opt.exact_n, residual,
                pass ? "pass" : "FAIL");
    return pass ? 0 : 1;
}

int run_scan(const CliOptions& opt) {
    ExperimentConfig config = config_from(opt);
    CumulantScanReport scan = bounded_cumulant_scan(config, opt.order);
    for (const auto& row : scan.rows)
        std::printf("  N=%-5d c%d=(% .6e,% .6e) se=%.6e\n", row.n, scan.order, row.estimate.value.real(),
                    row.estimate.value.imag(), row.estimate.std_error);
    if (scan.all_consistent_with_zero)
        std::printf("all estimates consistent with zero; slope taken as 0\n");
    std::printf("log-log slope %.4f +- %.4f -> %s\n", scan.slope, scan.slope_se,
                scan.pass ? "pass" : "FAIL");
    if (!opt.out.empty()) {
        std::ofstream out(opt.out, std::ios::binary);
        if (!out) throw IoError("cannot open output path: " + opt.out);
        out << "N,c_re,c_im,c_se\n";
        char buf[256];
        for (const auto& row : scan.rows) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", row.n, row.estimate.value.real(),
                          row.estimate.value.imag(), row.estimate.std_error);
            out << buf;
        }
    }
    return scan.pass ? 0 : 1;
}

int run_classify(const CliOptions& opt) {
    TwoBlockShape shape = make_two_block_shape(opt.m1, opt.m2);
    auto classified = classify_zero_pairings(shape);
    SignedPermutationMap inverse = shape.sigma.inverse();
    std::vector<SetPartition> scanned;
    for_each_partition(
        shape.sigma.domain(), PartitionFilter::SymmetricPairings,
        [&](const SetPartition& pi) {
            if (partition_polynomial(apply_permutation(inverse, pi)).is_zero()) scanned.push_back(pi);
            return true;
        },
        16);
    for (const auto& pi : classified) std::printf("  %s\n", pi.to_string().c_str());
    bool match = std::set<SetPartition>(classified.begin(), classified.end()) ==
                 std::set<SetPartition>(scanned.begin(), scanned.end());
    std::printf("m1=%d m2=%d classified=%zu scanned=%zu %s\n", opt.m1, opt.m2, classified.size(),
                scanned.size(), match ? "match" : "MISMATCH");
    return match ? 0 : 1;
}

int run_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const char* what) {
        std::printf("  [%s] %s\n", ok ? "ok" : "FAIL", what);
        if (!ok) ++failures;
    };

    check(enumerate_partitions(GroundSet::range(5), PartitionFilter::All).size() == 52,
          "partition count of a five-element set");
    check(mobius(SetPartition::singletons(GroundSet::range(4)),
                 SetPartition::one_block(GroundSet::range(4))) == -6,
          "mobius value on the four-element lattice");

    bool dichotomy = true;
    for (const auto& pi : enumerate_partitions(GroundSet::signed_range(2), PartitionFilter::All)) {
        double cap = std::pow(5.0, pi.block_count());
        double mag = std::abs(h_graph_sum(pi, 5, KernelConstraint::AtLeast));
        bool is_zero = partition_polynomial(pi).is_zero();
        if (mag > cap + 1e-6 * cap || (mag >= cap - 1e-6 * cap) != is_zero) dichotomy = false;
    }
    check(dichotomy, "exponential-sum dichotomy on [+-2]");

    bool reciprocity = true;
    for (int a = -6; a <= 6 && reciprocity; ++a)
        for (int c = -6; c <= 6 && reciprocity; ++c)
            for (int b = -4; b <= 4; ++b) {
                if (a == 0 || c == 0 || ((a * c + b) % 2 + 2) % 2 != 0) continue;
                if (reciprocity_residual({a, b, c}) > 1e-9) {
                    reciprocity = false;
                    break;
                }
            }
    check(reciprocity, "gauss sum reciprocity on a small grid");

    EnsembleSpec spec = EnsembleSpec::basic(ConjugatorCase::Case1, 1, 1);
    spec.d1 = DeterministicFamily::diagonal({1.0, -1.0, 0.0});
    spec.d2 = spec.d1;
    check(exact_cov_decomposition_check(spec, 3) <= 1e-10, "exact covariance decomposition at N=3");

    std::printf(failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fluctuation moments of signed-permutation/Fourier conjugation ensembles"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string config_path;

    CLI::App* verify =
        app.add_subcommand("verify-fluctuations", "Monte Carlo covariance against the limit formulas");
    CLI::App* exact = app.add_subcommand("exact-check", "exact small-N covariance decomposition residual");
    CLI::App* scan = app.add_subcommand("cumulant-scan", "higher-order trace cumulants over an N grid");
    CLI::App* classify =
        app.add_subcommand("classify-pairings", "symmetric pairings with vanishing shifted polynomial");
    CLI::App* selftest = app.add_subcommand("selftest", "quick internal consistency checks");
    for (CLI::App* cmd : {verify, exact, scan, classify}) add_common_options(cmd, opt, config_path);
    scan->add_option("--order", opt.order, "cumulant order (2..4)");
    exact->add_option("--n", opt.exact_n, "matrix size for the exact check");

    // the config file seeds the defaults; explicit flags then override
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];

    try {
        if (!config_path.empty()) apply_config_file(config_path, opt);
        app.parse(argc, argv);
        if (verify->parsed()) return run_verify(opt);
        if (exact->parsed()) return run_exact_check(opt);
        if (scan->parsed()) return run_scan(opt);
        if (classify->parsed()) return run_classify(opt);
        if (selftest->parsed()) return run_selftest();
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigParseError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const SpecInvalid& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
