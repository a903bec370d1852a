#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pks/pks.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumeric = 3, kTopology = 4 };

struct Common {
    std::string config_file;
    std::vector<std::string> assignments;
    std::string output_dir;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config_file, "key=value configuration file");
    cmd->add_option("-s,--set", c.assignments, "override: key=value (repeatable)");
    cmd->add_option("-o,--output-dir", c.output_dir, "output directory");
}

pks::RunConfig resolve(const Common& c) {
    pks::RunConfig cfg;
    if (!c.config_file.empty()) cfg = pks::load_config(c.config_file, cfg);
    for (const auto& a : c.assignments) pks::apply_assignment(cfg, a);
    if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
    return cfg;
}

int cmd_simulate(const pks::RunConfig& cfg) {
    auto res = pks::simulate(cfg);
    const auto& r = res.rows.back();
    std::cout << "t = " << pks::format_number(r.t) << "  J_eps = " << pks::format_number(r.J_eps)
              << "  z_eps = " << pks::format_number(r.z_eps) << "  lambda_eps = " << pks::format_number(r.lambda_eps)
              << "\n";
    return kOk;
}

int cmd_gamma(const pks::RunConfig& cfg) {
    pks::Nonlinearity nl(pks::make_law(cfg));
    std::cout << "quantity,value\n";
    std::cout << "theta," << pks::format_number(nl.theta()) << "\n";
    std::cout << "a," << pks::format_number(nl.a()) << "\n";
    std::cout << "gamma," << pks::format_number(nl.gamma()) << "\n";
    std::cout << "c_m," << pks::format_number(pks::power_law_cm(nl.law().m)) << "\n";
    std::cout << "\nv,W_sigma\n";
    for (int k = 0; k < 64; ++k) {
        double v = nl.theta() * k / 63.0;
        if (k == 63) v = nl.theta();
        std::cout << pks::format_number(v) << "," << pks::format_number(nl.W_sigma(v)) << "\n";
    }
    return kOk;
}

int cmd_profile(const pks::RunConfig& cfg, const std::string& out) {
    pks::Nonlinearity nl(pks::make_law(cfg));
    auto p = pks::optimal_profile(nl, cfg.epsilon);
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty()) {
        file.open(out);
        if (!file) throw pks::IoError("cannot open " + out);
        os = &file;
    }
    *os << "s,q,dq_ds\n";
    for (std::size_t k = 0; k < p.s_values.size(); ++k)
        *os << pks::format_number(p.s_values[k]) << "," << pks::format_number(p.q_values[k]) << ","
            << pks::format_number(p.slopes[k]) << "\n";
    return kOk;
}

int cmd_mcf(const pks::RunConfig& cfg, int record_every) {
    pks::validate_config(cfg);
    pks::Nonlinearity nl(pks::make_law(cfg));
    pks::Curve curve = pks::oracle_curve(cfg, nl);
    pks::VpmcfRunOptions opt;
    opt.dt_factor = cfg.mcf_dt_factor;
    opt.record_every = record_every;
    auto tr = pks::run_vpmcf(curve, 0.0, cfg.t_end, opt);
    std::filesystem::create_directories(cfg.output_dir);
    std::filesystem::path dir(cfg.output_dir);
    pks::CsvWriter traj((dir / "curve_trajectory.csv").string(), {"t", "component_id", "vertex_id", "x", "y"});
    for (std::size_t k = 0; k < tr.curves.size(); ++k)
        for (std::size_t j = 0; j < tr.curves[k].components.size(); ++j)
            for (std::size_t i = 0; i < tr.curves[k].components[j].size(); ++i) {
                auto p = tr.curves[k].components[j][i];
                traj.row_strings({pks::format_number(tr.times[k]), std::to_string(j), std::to_string(i),
                                  pks::format_number(p.x), pks::format_number(p.y)});
            }
    pks::CsvWriter summary((dir / "curve_summary.csv").string(), {"t", "area", "length", "lambda"});
    for (const auto& r : tr.rows) summary.row({r.t, r.area, r.length, r.lambda});
    if (tr.topology_stop) {
        std::cerr << "warning: oracle stopped at a topology change, t = " << pks::format_number(tr.rows.back().t)
                  << "\n";
        return kTopology;
    }
    return kOk;
}

int cmd_compare(const pks::RunConfig& cfg) {
    auto res = pks::compare(cfg);
    if (!res.rows.empty()) {
        const auto& r = res.rows.back();
        std::cout << "t = " << pks::format_number(r.t) << "  hausdorff = " << pks::format_number(r.hausdorff)
                  << "  lambda_eps_avg = " << pks::format_number(r.lambda_eps_avg)
                  << "  lambda_oracle = " << pks::format_number(r.lambda_oracle) << "\n";
    }
    if (res.topology_stop) {
        std::cerr << "warning: oracle stopped at a topology change; compare.csv is partial\n";
        return kTopology;
    }
    return kOk;
}

int cmd_sweep(const pks::RunConfig& cfg) {
    auto eps = pks::parse_number_list(cfg.epsilons);
    if (eps.empty()) throw pks::ConfigError("epsilons list is empty");
    for (double e : eps) {
        auto member = pks::sweep_member(cfg, e);
        pks::validate_config(member);
    }
    auto cells = pks::sweep(cfg, eps);
    bool failed = false, topo = false;
    for (const auto& c : cells) {
        std::cout << "eps = " << pks::format_number(c.epsilon) << "  status = " << c.status
                  << "  J_eps = " << pks::format_number(c.final_report.J_eps)
                  << "  hausdorff = " << pks::format_number(c.hausdorff) << "\n";
        if (c.status.rfind("failed", 0) == 0) failed = true;
        if (c.status == "oracle_topology_stop") topo = true;
    }
    if (failed) return kNumeric;
    if (topo) return kTopology;
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Keller-Segel phase-separation solver and curvature-flow oracle"};
    app.require_subcommand(1);
    Common sim, gam, prof, mcf, cmp, swp;
    std::string profile_out;
    int record_every = 100;
    std::string eps_list;

    auto* s = app.add_subcommand("simulate", "run the phase-field evolution");
    add_common(s, sim);
    auto* g = app.add_subcommand("gamma", "print theta, a, gamma, c_m and a W_sigma table");
    add_common(g, gam);
    auto* p = app.add_subcommand("profile", "emit the optimal 1D transition profile as CSV");
    add_common(p, prof);
    p->add_option("--out", profile_out, "file instead of stdout");
    auto* m = app.add_subcommand("mcf", "run the volume-preserving curvature-flow oracle only");
    add_common(m, mcf);
    m->add_option("--record-every", record_every, "store the curve every n steps");
    auto* c = app.add_subcommand("compare", "phase field against the oracle from matched shapes");
    add_common(c, cmp);
    auto* w = app.add_subcommand("sweep", "run a list of epsilons concurrently");
    add_common(w, swp);
    w->add_option("--epsilons", eps_list, "comma separated epsilons");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*s) return cmd_simulate(resolve(sim));
        if (*g) return cmd_gamma(resolve(gam));
        if (*p) return cmd_profile(resolve(prof), profile_out);
        if (*m) return cmd_mcf(resolve(mcf), record_every);
        if (*c) return cmd_compare(resolve(cmp));
        if (*w) {
            auto cfg = resolve(swp);
            if (!eps_list.empty()) cfg.epsilons = eps_list;
            return cmd_sweep(cfg);
        }
    } catch (const pks::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const pks::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kConfig;
    } catch (const pks::TopologyError& e) {
        std::cerr << "topology stop: " << e.what() << "\n";
        return kTopology;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    }
    return kOk;
}
