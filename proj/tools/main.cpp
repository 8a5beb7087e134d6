// Command-line front end: simulate factor paths, run the decompositions, and
// produce the worked-demo bundles.  Every run writes a manifest recording the
// command, seeds, and digests of all files read and written, so reruns can be
// checked for byte-identical reproduction.
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 mathematical precondition
// violation (permutation cap, simultaneous jumps under --strict, expiry).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "seqdec/seqdec.hpp"

namespace fs = std::filesystem;

namespace {

using namespace seqdec;

std::string join_args(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i > 0) out += ' ';
        out += argv[i];
    }
    return out;
}

// Collects the output files of one run and writes the manifest last.
class RunWriter {
public:
    RunWriter(std::string command, fs::path dir)
        : start_(std::chrono::steady_clock::now()), dir_(std::move(dir)) {
        manifest_.command = std::move(command);
        fs::create_directories(dir_);
    }

    const fs::path& dir() const { return dir_; }
    void note_seed(std::uint64_t seed) { manifest_.seeds.push_back(seed); }
    void note_input(const std::string& file) { manifest_.add_input(file); }

    template <class Body>
    void write(const std::string& name, Body&& body) {
        const fs::path file = dir_ / name;
        {
            std::ofstream out(file);
            if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
            body(out);
        }
        manifest_.add_output(file.string());
        std::cout << "wrote " << file.string() << "\n";
    }

    void finish() {
        manifest_.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const fs::path file = dir_ / "manifest.json";
        write_manifest_file(file.string(), manifest_);
        std::cout << "wrote " << file.string() << "\n";
    }

private:
    std::chrono::steady_clock::time_point start_;
    fs::path dir_;
    RunManifest manifest_;
};

SmoothPayoff make_payoff(const std::string& name) {
    if (name == "product2") return product_payoff(2);
    if (name == "product3") return product_payoff(3);
    if (name == "product4") return product_payoff(4);
    if (name == "quad2") return default_quadratic_payoff(2);
    if (name == "quad3") return default_quadratic_payoff(3);
    if (name == "quad4") return default_quadratic_payoff(4);
    if (name == "bond") return bond_payoff(1.0);
    if (name == "bscall") return bs_call_payoff(OptionSpec{});
    throw std::invalid_argument(
        "unknown payoff '" + name +
        "' (known: product2, product3, product4, quad2, quad3, quad4, bond, bscall)");
}

// Bond-demo model config, an extra `kind` on top of the single-process ones.
BondSpec parse_bond_config(detail::KvConfig& cfg) {
    BondSpec spec;
    spec.maturity = cfg.number_or("maturity", spec.maturity);
    spec.kappa = cfg.number_or("kappa", spec.kappa);
    spec.theta = cfg.number_or("theta", spec.theta);
    spec.sigma = cfg.number_or("sigma", spec.sigma);
    spec.r0 = cfg.number_or("r0", spec.r0);
    spec.fx_vol = cfg.number_or("fx_vol", spec.fx_vol);
    spec.rho = cfg.number_or("rho", spec.rho);
    if (const std::string* jumps = cfg.find("jumps"))
        spec.credit_jumps = detail::parse_jump_list(*jumps);
    spec.steps = static_cast<int>(cfg.number_or("steps", spec.steps));
    spec.seed = static_cast<std::uint64_t>(cfg.number_or("seed", 0.0));
    cfg.reject_unused();
    return spec;
}

int cmd_simulate(const std::string& config_file, const std::string& out_dir,
                 const std::string& command) {
    std::ifstream in(config_file);
    if (!in) throw std::runtime_error("cannot open config " + config_file);
    std::stringstream text;
    text << in.rdbuf();

    Path path;
    std::uint64_t seed = 0;
    std::istringstream peek(text.str());
    auto kv = detail::read_kv_config(peek);
    if (kv.require("kind") == "bond_demo") {
        const BondSpec spec = parse_bond_config(kv);
        seed = spec.seed;
        path = bond_path(spec);
    } else {
        std::istringstream body(text.str());
        const ModelSpec spec = parse_model_config(body);
        seed = spec.seed;
        path = simulate(spec);
    }

    RunWriter run(command, out_dir);
    run.note_input(config_file);
    run.note_seed(seed);
    run.write("path.csv", [&](std::ostream& os) { write_path_csv(path, os); });
    run.finish();
    return 0;
}

struct DecomposeArgs {
    std::string method;
    std::string perm;
    std::string payoff;
    std::string path_file;
    std::string out_dir = "decompose_out";
    bool strict = false;
    int jobs = 1;
};

int cmd_decompose(const DecomposeArgs& args, bool perm_given, const std::string& command) {
    const Method method = parse_method(args.method);
    const bool needs_perm = method == Method::su || method == Method::isu;
    if (needs_perm && !perm_given)
        throw std::invalid_argument(std::string("--perm is required for method '") +
                                    method_name(method) + "'");
    if (!needs_perm && perm_given)
        throw std::invalid_argument("--perm is only accepted for methods su and isu");

    const Path path = read_path_csv_file(args.path_file);
    const SmoothPayoff payoff = make_payoff(args.payoff);

    Decomposition dec;
    switch (method) {
        case Method::su:
            dec = su_decompose(payoff, path, parse_permutation(args.perm, path.factors()));
            break;
        case Method::oat:
            dec = oat_decompose(payoff, path);
            break;
        case Method::asu:
            dec = asu_decompose(payoff, path, args.jobs);
            break;
        case Method::asu2:
            dec = asu_two_perm(payoff, path);
            break;
        case Method::isu:
            dec = isu_closed_form(payoff, path, parse_permutation(args.perm, path.factors()));
            break;
        case Method::ioat:
            dec = ioat_closed_form(payoff, path);
            break;
        case Method::iasu:
            if (has_simultaneous_jumps(path)) {
                if (args.strict)
                    throw SimultaneousJumpsPresent(
                        "path has simultaneous jumps and --strict is set");
                std::cerr << "warning: simultaneous jumps present; "
                             "averaging over the full order enumeration\n";
            }
            dec = iasu_closed_form(payoff, path);
            break;
    }

    RunWriter run(command, args.out_dir);
    run.note_input(args.path_file);
    run.write("decomposition.csv", [&](std::ostream& os) { write_decomposition_csv(dec, os); });
    run.finish();
    return 0;
}

struct DemoArgs {
    std::string name;
    std::string out_dir;       // empty: "<name>_demo"
    std::uint64_t seed = 0;
    int steps = 0;             // 0: demo default
    long n = 0;                // counterexample size; 0: demo default
    double lambda = 0.99;
    double horizon = 1.0;
};

CorrelatedGbmPairParams demo_pair_params() {
    CorrelatedGbmPairParams p;
    p.x1_0 = 1.0;
    p.x2_0 = 1.0;
    p.a1 = 0.05;
    p.a2 = 0.03;
    p.b1 = 0.2;
    p.b2 = 0.15;
    p.rho = -0.3;
    return p;
}

void print_final_contributions(const Decomposition& dec) {
    std::cout << "total change " << dec.total.back() << "\n";
    for (int i = 0; i < dec.factors(); ++i)
        std::cout << "  " << dec.label(i) << "  " << dec.contributions[i].back() << "\n";
}

int demo_stock(const DemoArgs& args, const std::string& command) {
    ModelSpec spec;
    spec.params = demo_pair_params();
    spec.steps = args.steps > 0 ? args.steps : 250;
    spec.horizon = args.horizon;
    spec.seed = args.seed;
    const Path path = simulate(spec);
    const SmoothPayoff payoff = stock_product_payoff();
    Decomposition dec = iasu_closed_form(payoff, path);
    dec.labels = {"X1", "X2"};
    const InteractionMatrix inter = interaction_matrix(payoff, path);

    RunWriter run(command, args.out_dir.empty() ? "stock_demo" : args.out_dir);
    run.note_seed(args.seed);
    run.write("path.csv", [&](std::ostream& os) { write_path_csv(path, os); });
    run.write("decomposition.csv", [&](std::ostream& os) { write_decomposition_csv(dec, os); });
    run.write("interactions.csv", [&](std::ostream& os) { write_interactions_csv(inter, os); });
    run.write("waterfall.csv", [&](std::ostream& os) {
        write_waterfall_csv(make_waterfall(dec, 0.0, spec.horizon), os);
    });
    print_final_contributions(dec);
    run.finish();
    return 0;
}

int demo_var(const DemoArgs& args, const std::string& command) {
    const CorrelatedGbmPairParams params = demo_pair_params();
    ModelSpec spec;
    spec.params = params;
    spec.steps = args.steps > 0 ? args.steps : 250;
    spec.horizon = args.horizon;
    spec.seed = args.seed;
    const Path path = simulate(spec);
    Decomposition stock = iasu_closed_form(stock_product_payoff(), path);
    stock.labels = {"X1", "X2"};
    Decomposition var = cvar_decomposition(params, path, args.horizon, args.lambda);
    var.labels = {"X1", "X2"};

    RunWriter run(command, args.out_dir.empty() ? "var_demo" : args.out_dir);
    run.note_seed(args.seed);
    run.write("path.csv", [&](std::ostream& os) { write_path_csv(path, os); });
    run.write("stock_decomposition.csv",
              [&](std::ostream& os) { write_decomposition_csv(stock, os); });
    run.write("cvar_decomposition.csv",
              [&](std::ostream& os) { write_decomposition_csv(var, os); });
    run.write("waterfall.csv", [&](std::ostream& os) {
        write_waterfall_csv(make_waterfall(var, 0.0, args.horizon), os);
    });
    const double drift = params.a1 + params.a2 - 0.5 * (params.b1 * params.b1 + params.b2 * params.b2);
    const double variance = params.b1 * params.b1 + params.b2 * params.b2 +
                            2.0 * params.rho * params.b1 * params.b2;
    std::cout << "quantile weight "
              << lognormal_quantile(drift * args.horizon, std::sqrt(variance * args.horizon),
                                    args.lambda)
              << " at lambda " << args.lambda << "\n";
    print_final_contributions(var);
    run.finish();
    return 0;
}

int demo_option(const DemoArgs& args, const std::string& command) {
    OptionSpec spec;
    if (args.steps > 0) spec.steps = args.steps;
    const Path path = bs_pnl_path(spec, args.seed);
    Decomposition dec = iasu_closed_form(bs_call_payoff(spec), path);
    dec.labels = {"S", "tau"};

    RunWriter run(command, args.out_dir.empty() ? "option_demo" : args.out_dir);
    run.note_seed(args.seed);
    run.write("path.csv", [&](std::ostream& os) { write_path_csv(path, os); });
    run.write("decomposition.csv", [&](std::ostream& os) { write_decomposition_csv(dec, os); });
    run.write("greeks.csv", [&](std::ostream& os) {
        os << "time,spot,price,delta,gamma,theta\n";
        for (int m = 0; m < path.points(); ++m) {
            const BsGreeks g = bs_greeks(path.values[0][m], path.values[1][m], spec);
            os << detail::format_double(path.times[m]) << ','
               << detail::format_double(path.values[0][m]) << ','
               << detail::format_double(g.price) << ',' << detail::format_double(g.delta) << ','
               << detail::format_double(g.gamma) << ',' << detail::format_double(g.theta) << '\n';
        }
    });
    run.write("waterfall.csv", [&](std::ostream& os) {
        write_waterfall_csv(make_waterfall(dec, 0.0, path.times.back()), os);
    });
    print_final_contributions(dec);
    run.finish();
    return 0;
}

int demo_bond(const DemoArgs& args, const std::string& command) {
    BondSpec spec;
    spec.seed = args.seed;
    if (args.steps > 0) spec.steps = args.steps;
    const BondDecomposition bond = bond_decomposition(spec);

    RunWriter run(command, args.out_dir.empty() ? "bond_demo" : args.out_dir);
    run.note_seed(spec.seed);
    run.write("path.csv", [&](std::ostream& os) { write_path_csv(bond.path, os); });
    run.write("decomposition.csv",
              [&](std::ostream& os) { write_decomposition_csv(bond.dec, os); });
    run.write("interactions.csv",
              [&](std::ostream& os) { write_interactions_csv(bond.interactions, os); });
    run.write("waterfall.csv", [&](std::ostream& os) {
        // Two report windows: the pre-jump window and the whole horizon.
        const int cut = static_cast<int>(std::lround(0.4 * spec.steps));
        auto entries = make_waterfall(bond.dec, 0.0, bond.dec.times[cut]);
        const auto full = make_waterfall(bond.dec, 0.0, bond.dec.times.back());
        entries.insert(entries.end(), full.begin(), full.end());
        write_waterfall_csv(entries, os);
    });
    double max_gap = 0.0;
    for (double g : bond.dec.additivity_gap) max_gap = std::max(max_gap, std::abs(g));
    print_final_contributions(bond.dec);
    std::cout << "max additivity gap " << max_gap << "\n";
    run.finish();
    return 0;
}

int demo_stability(const DemoArgs& args, const std::string& command) {
    const int n = args.n > 0 ? static_cast<int>(args.n) : 100000;
    const StabilityGap result = stability_gap(n, args.horizon, args.seed);
    const Path path = simulate_brownian(n, args.horizon, args.seed);
    const double b_end = path.values[0].back();

    RunWriter run(command, args.out_dir.empty() ? "stability_demo" : args.out_dir);
    run.note_seed(args.seed);
    run.write("stability.csv", [&](std::ostream& os) {
        os << "time,right_sum,left_sum,gap\n";
        const auto& b = path.values[0];
        double right = 0.0, left = 0.0, gap = 0.0;
        os << detail::format_double(path.times[0]) << ",0,0,0\n";
        for (int l = 1; l <= n; ++l) {
            const double db = b[l] - b[l - 1];
            right += b[l] * db;
            left += b[l - 1] * db;
            gap += db * db;
            os << detail::format_double(path.times[l]) << ',' << detail::format_double(right)
               << ',' << detail::format_double(left) << ',' << detail::format_double(gap) << '\n';
        }
    });
    std::cout << "right-point sum  " << result.right_sum << "\n"
              << "left-point sum   " << result.left_sum << "\n"
              << "gap              " << result.gap << "  (estimates horizon " << args.horizon
              << ")\n"
              << "right + left     " << result.right_sum + result.left_sum << "  (B(T)^2 = "
              << b_end * b_end << ")\n";
    run.finish();
    return 0;
}

int demo_harmonic(const DemoArgs& args, const std::string& command) {
    const long n = args.n > 0 ? args.n : 100000;
    const double value = harmonic_divergence(n);

    RunWriter run(command, args.out_dir.empty() ? "harmonic_demo" : args.out_dir);
    run.write("harmonic.csv", [&](std::ostream& os) {
        os << "n,partial_sum\n";
        for (long k = 1; k < n; k *= 2)
            os << k << ',' << detail::format_double(harmonic_divergence(k)) << '\n';
        os << n << ',' << detail::format_double(value) << '\n';
    });
    std::cout << "first-factor sum over " << n << " jumps: " << detail::format_double(value)
              << "\n";
    run.finish();
    return 0;
}

int cmd_demo(const DemoArgs& args, const std::string& command) {
    if (args.name == "stock") return demo_stock(args, command);
    if (args.name == "var") return demo_var(args, command);
    if (args.name == "option") return demo_option(args, command);
    if (args.name == "bond") return demo_bond(args, command);
    if (args.name == "stability") return demo_stability(args, command);
    if (args.name == "harmonic") return demo_harmonic(args, command);
    throw std::invalid_argument("unknown demo '" + args.name +
                                "' (known: stock, var, option, bond, stability, harmonic)");
}

} // namespace

int main(int argc, char** argv) {
    const std::string command = join_args(argc, argv);
    CLI::App app{"Sequential decompositions of smooth payoffs along factor paths"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Simulate a factor path from a model config");
    std::string sim_config, sim_out = "simulate_out";
    sim->add_option("--config", sim_config, "flat key=value model config")->required();
    sim->add_option("--out", sim_out, "output directory");

    auto* dec = app.add_subcommand("decompose", "Decompose a payoff along a path");
    DecomposeArgs dec_args;
    dec->add_option("--method", dec_args.method, "su|oat|asu|asu2|isu|ioat|iasu")->required();
    auto* perm_opt = dec->add_option("--perm", dec_args.perm,
                                     "factor order for su/isu: 'id', 'rev', or e.g. 2,1,3");
    dec->add_option("--payoff", dec_args.payoff, "payoff name")->required();
    dec->add_option("--path", dec_args.path_file, "path CSV file")->required();
    dec->add_option("--out", dec_args.out_dir, "output directory");
    dec->add_flag("--strict", dec_args.strict,
                  "error out instead of falling back on simultaneous jumps");
    dec->add_option("--jobs", dec_args.jobs, "worker threads for the order average");

    auto* demo = app.add_subcommand("demo", "Run a built-in demo and write its bundle");
    DemoArgs demo_args;
    demo->add_option("name", demo_args.name, "stock|var|option|bond|stability|harmonic")
        ->required();
    demo->add_option("--out", demo_args.out_dir, "output directory (default <name>_demo)");
    demo->add_option("--seed", demo_args.seed, "RNG seed");
    demo->add_option("--steps", demo_args.steps, "grid steps");
    demo->add_option("--n", demo_args.n, "size for stability/harmonic");
    demo->add_option("--lambda", demo_args.lambda, "quantile level for the var demo");
    demo->add_option("--horizon", demo_args.horizon, "time horizon");

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return cmd_simulate(sim_config, sim_out, command);
        if (dec->parsed()) return cmd_decompose(dec_args, perm_opt->count() > 0, command);
        return cmd_demo(demo_args, command);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const PermutationCapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
