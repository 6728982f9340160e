// husimi_cli: grid evaluation, reconstruction pipelines, error experiments and figure data.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical-contract failure.

#include "husimi/husimi.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <utility>

using namespace husimi;

namespace {

SqueezedFrame basis_of(const JobConfig& cfg) {
    const std::string& b = cfg.get("basis");
    return b == "frame" ? parse_frame(cfg.get("frame")) : parse_frame(b, "basis");
}

int dim_of(const JobConfig& cfg) {
    const auto d = parse_int(cfg.get("dim"), "dim");
    if (d < 1 || d > 400) throw ConfigError("dim must lie in [1, 400]");
    return static_cast<int>(d);
}

DensityOperator build_state(const JobConfig& cfg) {
    const StateSpec st = parse_state(cfg.get("state"));
    const SqueezedFrame basis = basis_of(cfg);
    const int dim = dim_of(cfg);
    switch (st.kind) {
        case StateSpec::Kind::fock:
            return DensityOperator::fock(st.n, std::max(dim, st.n + 1), basis);
        case StateSpec::Kind::coherent:
            return DensityOperator::coherent(basis, {st.x, st.p}, dim);
        case StateSpec::Kind::thermal:
            return DensityOperator::thermal(st.mean, dim, basis);
        case StateSpec::Kind::matrix: {
            DensityOperator rho(parse_matrix_file(read_file(st.path)), basis);
            const auto report = validate_density(rho, 1e-8);
            if (!report.passes) throw ConfigError("state matrix: not a density matrix (" + report.failure + ")");
            return rho;
        }
    }
    throw ConfigError("state: unsupported kind");
}

QuadratureSpec quad_of(const JobConfig& cfg) {
    QuadratureSpec q;
    const auto n = parse_int(cfg.get("quad"), "quad");
    if (n < 4 || n > 260) throw ConfigError("quad must lie in [4, 260]");
    q.nodes = static_cast<int>(n);
    return q;
}

double tolerance_of(const JobConfig& cfg) {
    const double t = parse_double(cfg.get("tolerance"), "tolerance");
    if (!(t > 0.0)) throw ConfigError("tolerance must be positive");
    return t;
}

PhasePoint point_of(const JobConfig& cfg, const std::string& key) {
    const auto v = parse_doubles(cfg.get(key), 2, key);
    return {v[0], v[1]};
}

GridCsv with_metadata(const JobConfig& cfg, const std::string& formula) {
    GridCsv out;
    for (const auto& [k, v] : JobConfig::defaults()) out.meta(k, cfg.get(k));
    out.meta("formula", formula);
    return out;
}

void emit(const JobConfig& cfg, const std::string& text) {
    const std::string& path = cfg.get("out");
    if (path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << text;
}

int cmd_husimi(const JobConfig& cfg) {
    const GridSpec g = parse_grid(cfg.get("grid"));
    const HusimiField field(parse_frame(cfg.get("frame")), build_state(cfg), tolerance_of(cfg));
    GridCsv out = with_metadata(cfg, g.complex_offsets() ? "continued_fock_series" : "husimi_real");
    for (double x : g.x.values())
        for (double p : g.p.values()) {
            const cplx xc(x, g.x_im), pc(p, g.p_im);
            out.add(xc, pc, g.complex_offsets() ? husimi_continued(field, {xc, pc}) : husimi_real(field, x, p));
        }
    emit(cfg, out.to_string());
    return 0;
}

int cmd_invert(const JobConfig& cfg) {
    const HusimiField field(parse_frame(cfg.get("frame")), build_state(cfg), tolerance_of(cfg));
    const PhasePoint a = point_of(cfg, "pt1"), b = point_of(cfg, "pt2");
    GridCsv out = with_metadata(cfg, "offdiag_from_continuation");
    out.columns = {"x1", "p1", "x2", "p2", "value_re", "value_im"};
    const cplx v = offdiag_element(field, a, b);
    out.rows.push_back({a.x, a.p, b.x, b.p, v.real(), v.imag()});
    emit(cfg, out.to_string());
    return 0;
}

int cmd_wigner(const JobConfig& cfg) {
    const GridSpec g = parse_grid(cfg.get("grid"));
    if (g.complex_offsets()) throw ConfigError("wigner: grid must be real");
    const HusimiField field(parse_frame(cfg.get("frame")), build_state(cfg), tolerance_of(cfg));
    const QuadratureSpec quad = quad_of(cfg);
    GridCsv out = with_metadata(cfg, "wigner_from_imaginary");
    const auto xs = g.x.values(), ps = g.p.values();
    const WignerGrid w = wigner_grid(field, xs, ps, quad);
    out.meta("normalization", w.mass());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ps.size(); ++j) out.add(xs[i], ps[j], w.values(i, j));
    emit(cfg, out.to_string());
    return 0;
}

int cmd_frame_change(const JobConfig& cfg) {
    const GridSpec g = parse_grid(cfg.get("grid"));
    if (g.complex_offsets()) throw ConfigError("frame-change: grid must be real");
    if (cfg.get("basis") != "frame" && !parse_frame(cfg.get("basis"), "basis").same_as(SqueezedFrame{}))
        throw ConfigError("frame-change: the source state must be given in the ordinary number basis");
    const SqueezedFrame target = parse_frame(cfg.get("frame"));
    const int dim = dim_of(cfg);
    const StateSpec st = parse_state(cfg.get("state"));
    DensityOperator rho = [&] {
        switch (st.kind) {
            case StateSpec::Kind::fock: return DensityOperator::fock(st.n, std::max(dim, st.n + 1));
            case StateSpec::Kind::coherent: return DensityOperator::coherent({}, {st.x, st.p}, dim);
            case StateSpec::Kind::thermal: return DensityOperator::thermal(st.mean, dim);
            default: break;
        }
        JobConfig c = cfg;
        c.set("basis", "1,0");
        return build_state(c);
    }();
    const HusimiField ref(SqueezedFrame{}, rho, tolerance_of(cfg));
    const QuadratureSpec quad = quad_of(cfg);
    const bool small = target.lambda() < 1.0;
    GridCsv out = with_metadata(cfg, small ? "frame_change_small_lambda" : "frame_change_large_lambda");
    for (double x : g.x.values())
        for (double p : g.p.values())
            out.add(x, p,
                    small ? frame_change_small_lambda(ref, target, x, p, quad)
                          : frame_change_large_lambda(ref, target, x, p, quad));
    emit(cfg, out.to_string());
    return 0;
}

int cmd_error_sim(const JobConfig& cfg) {
    const HusimiField field(parse_frame(cfg.get("frame")), build_state(cfg), tolerance_of(cfg));
    const PhasePoint at = point_of(cfg, "at");
    const std::string& model = cfg.get("noise_model");
    if (model != "independent" && model != "grid") throw ConfigError("noise_model must be independent or grid");
    const NoiseSpec noise(parse_double(cfg.get("sigma"), "sigma"),
                          model == "grid" ? NoiseModel::grid_sampled : NoiseModel::independent_derivatives);
    MonteCarloSpec spec;
    spec.trials = static_cast<int>(parse_int(cfg.get("trials"), "trials"));
    const auto seed = parse_int(cfg.get("seed"), "seed");
    if (seed < 0) throw ConfigError("seed must be >= 0");
    spec.seed = static_cast<std::uint64_t>(seed);
    std::vector<DisplacementPair> disps;
    for (const auto& d : parse_disps(cfg.get("disp"))) disps.push_back({d.eta, d.zeta});
    const auto rows = monte_carlo_error_growth(field, at.x, at.p, noise, disps, spec);
    GridCsv out = with_metadata(cfg, "monte_carlo_error_growth");
    out.columns = {"eta_re", "eta_im", "zeta_re", "zeta_im", "rms", "predicted"};
    for (const auto& r : rows)
        out.rows.push_back({r.disp.eta.real(), r.disp.eta.imag(), r.disp.zeta.real(), r.disp.zeta.imag(), r.rms,
                            r.predicted});
    emit(cfg, out.to_string());
    return 0;
}

int cmd_figures(const JobConfig& cfg) {
    const std::string& dir = cfg.get("out");
    if (dir == "-") throw ConfigError("figures: --out must name a directory");
    const GridSpec g = parse_grid(cfg.get("figure_grid"));
    if (g.complex_offsets()) throw ConfigError("figures: grid must be real");
    const auto n = parse_int(cfg.get("figure_n"), "figure_n");
    if (n < 0 || n > 200) throw ConfigError("figure_n must lie in [0, 200]");
    std::filesystem::create_directories(dir);
    struct Panel {
        const char* name;
        double lambda, theta;
    };
    const Panel panels[] = {{"fig1a", 0.5, 0.0}, {"fig1b", 0.25, 0.0}, {"fig2a", 0.25, pi / 4}, {"fig2b", 0.25, pi / 2}};
    const auto xs = g.x.values(), ps = g.p.values();
    for (const auto& panel : panels) {
        const auto fig = fock_figure(static_cast<int>(n), SqueezedFrame(panel.lambda, panel.theta), xs, ps);
        GridCsv out = with_metadata(cfg, "fock_closed_form");
        out.meta("panel", panel.name);
        out.meta("lambda", panel.lambda);
        out.meta("theta", panel.theta);
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < ps.size(); ++j) out.add(xs[i], ps[j], fig.values(i, j));
        const auto path = std::filesystem::path(dir) / (std::string(panel.name) + ".csv");
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + path.string() + "'");
        f << out.to_string();
    }
    return 0;
}

int dispatch(const JobConfig& cfg) {
    const std::string& c = cfg.get("command");
    if (c == "husimi") return cmd_husimi(cfg);
    if (c == "invert") return cmd_invert(cfg);
    if (c == "wigner") return cmd_wigner(cfg);
    if (c == "frame-change") return cmd_frame_change(cfg);
    if (c == "error-sim") return cmd_error_sim(cfg);
    if (c == "figures") return cmd_figures(cfg);
    throw ConfigError("unknown command '" + c + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalised Husimi functions: evaluation, reconstruction and error experiments"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key=value config file; flags override it");
    std::map<std::string, std::string> flags;
    for (const auto& [key, def] : JobConfig::defaults()) {
        if (key == "command") continue;
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        app.add_option(flag, flags[key], "default: " + def);
    }

    std::string rerun_path;
    const std::pair<const char*, const char*> commands[] = {
        {"husimi", "Q on a real grid, or its continuation when the grid has imaginary offsets"},
        {"invert", "off-diagonal element <pt1|rho|pt2> from the continued Q"},
        {"wigner", "Wigner function from Q at imaginary arguments"},
        {"frame-change", "Q in --frame from Q of an ordinary-basis state"},
        {"error-sim", "Monte Carlo error growth of the Taylor continuation"},
        {"figures", "Fock-state Q panels written into the --out directory"},
    };
    for (const auto& [c, help] : commands) app.add_subcommand(c, help)->fallthrough();
    app.add_subcommand("defaults", "print every config key with its default")->fallthrough();
    app.add_subcommand("rerun", "repeat the job recorded in an output's metadata")
        ->fallthrough()
        ->add_option("csv", rerun_path, "output file of an earlier run")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        JobConfig cfg;
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "defaults") {
            std::cout << cfg.to_text();
            return 0;
        }
        if (sub == "rerun") {
            cfg.apply_csv_metadata(read_file(rerun_path));
        } else {
            if (!config_path.empty()) cfg.apply_text(read_file(config_path));
            cfg.set("command", sub);
        }
        for (const auto& [key, def] : JobConfig::defaults()) {
            if (key == "command") continue;
            std::string flag = "--" + key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            if (app.count(flag) > 0) cfg.set(key, flags[key]);
        }
        return dispatch(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
