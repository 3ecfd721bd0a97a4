#include "twistspec/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "twistspec/certify.hpp"
#include "twistspec/eigensolve.hpp"
#include "twistspec/tube.hpp"
#include "twistspec/xsection.hpp"

namespace twistspec::cli {

namespace {

using json = nlohmann::ordered_json;

/// 17 significant digits: lossless round trip for doubles.
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const RunOptions& opt, const std::string& name) {
    std::filesystem::create_directories(opt.out_dir);
    const auto path = std::filesystem::path(opt.out_dir) / name;
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path.string());
    return out;
}

std::uint64_t effective_seed(const ExperimentConfig& cfg, const RunOptions& opt) {
    return opt.seed_override ? *opt.seed_override : cfg.seed;
}

/// Runs fn(i) for i in [0, count) on a small worker pool; results must
/// be written into preallocated per-index slots.
void parallel_for(int jobs, int count, const std::function<void(int)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(jobs, count);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

const CrossSection& require_shape(const ExperimentConfig& cfg) {
    if (!cfg.cross_section) throw ConfigError("config needs a cross_section");
    return *cfg.cross_section;
}

const TwistProfile& require_profile(const ExperimentConfig& cfg) {
    if (!cfg.profile) throw ConfigError("config needs a profile");
    return *cfg.profile;
}

}  // namespace

int run_xsection(const ExperimentConfig& cfg, const RunOptions& opt) {
    const CrossSection& omega = require_shape(cfg);
    const std::uint64_t seed = effective_seed(cfg, opt);
    const std::vector<double> betas =
        cfg.beta_list ? *cfg.beta_list : std::vector<double>{};

    const TransverseGrid grid = build_grid(omega, cfg.h);
    std::optional<TransverseGrid> grid_half;
    if (cfg.richardson) grid_half = build_grid(omega, 0.5 * cfg.h);

    struct Row {
        CrossSectionSpectrum spec;
        double richardson = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<Row> rows(betas.size());
    parallel_for(opt.jobs, static_cast<int>(betas.size()), [&](int i) {
        const double beta = betas[static_cast<size_t>(i)];
        Row r;
        r.spec = eigs_xsection(assemble_xsection(grid, beta), cfg.k, cfg.tol, seed,
                               cfg.max_iter);
        if (grid_half) {
            const auto fine = eigs_xsection(assemble_xsection(*grid_half, beta), 1,
                                            cfg.tol, seed, cfg.max_iter);
            // First-order elimination of the staircase boundary bias.
            r.richardson = 2.0 * fine.eigenvalues[0] - r.spec.eigenvalues[0];
        }
        rows[static_cast<size_t>(i)] = std::move(r);
    });

    auto out = open_out(opt, "xsection.csv");
    out << "beta,h";
    for (int j = 1; j <= cfg.k; ++j) out << ",lambda_" << j;
    for (int j = 1; j <= cfg.k; ++j) out << ",resid_" << j;
    out << ",lambda1_richardson\n";
    bool all_converged = true;
    for (size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        out << fmt17(betas[i]) << ',' << fmt17(r.spec.h);
        for (double v : r.spec.eigenvalues) out << ',' << fmt17(v);
        for (double v : r.spec.residual_norms) out << ',' << fmt17(v);
        out << ',' << (cfg.richardson ? fmt17(r.richardson) : "") << '\n';
        for (char c : r.spec.converged) all_converged &= static_cast<bool>(c);
    }
    return all_converged ? 0 : 1;
}

int run_spectrum(const ExperimentConfig& cfg, const RunOptions& opt) {
    const CrossSection& omega = require_shape(cfg);
    const TwistProfile& profile = require_profile(cfg);
    const std::uint64_t seed = effective_seed(cfg, opt);

    std::vector<double> Ls = cfg.L_list;
    if (Ls.empty()) {
        if (!cfg.L) throw ConfigError("spectrum needs L or L_list");
        Ls.push_back(*cfg.L);
    }
    std::vector<EndCondition> ends;
    if (cfg.end == "dirichlet" || cfg.end == "both") ends.push_back(EndCondition::Dirichlet);
    if (cfg.end == "neumann" || cfg.end == "both") ends.push_back(EndCondition::Neumann);

    struct Point {
        double L;
        EndCondition end;
        EigResult eig;
        double h1 = 0;
    };
    std::vector<Point> pts;
    for (double L : Ls)
        for (EndCondition e : ends) pts.push_back({L, e, {}, 0.0});

    const TransverseGrid tgrid = build_grid(omega, cfg.h);
    parallel_for(opt.jobs, static_cast<int>(pts.size()), [&](int i) {
        Point& p = pts[static_cast<size_t>(i)];
        const LongitudinalGrid lg = longitudinal_grid(p.L, cfg.h1, p.end);
        p.h1 = lg.h1();
        const TubeOperator op = assemble_tube(tgrid, lg, profile);
        p.eig = lobpcg(op.matrix, cfg.k, cfg.tol, cfg.max_iter, seed);
    });

    auto out = open_out(opt, "spectrum.csv");
    out << "L,end,h,h1";
    for (int j = 1; j <= cfg.k; ++j) out << ",lambda_" << j;
    for (int j = 1; j <= cfg.k; ++j) out << ",resid_" << j;
    out << '\n';
    bool all_converged = true;
    for (const Point& p : pts) {
        out << fmt17(p.L) << ','
            << (p.end == EndCondition::Dirichlet ? "dirichlet" : "neumann") << ','
            << fmt17(cfg.h) << ',' << fmt17(p.h1);
        for (double v : p.eig.eigenvalues) out << ',' << fmt17(v);
        for (double v : p.eig.residual_norms) out << ',' << fmt17(v);
        out << '\n';
        for (char c : p.eig.converged) all_converged &= static_cast<bool>(c);
    }
    return all_converged ? 0 : 1;
}

namespace {

json geometry_json(const GeometrySummary& g) {
    json j;
    j["contains_origin"] = g.contains_origin;
    if (g.r) j["r"] = *g.r;
    j["R"] = g.R;
    j["m"] = g.m;
    return j;
}

json essential_bound_json(const EssentialBound& eb) {
    json j;
    j["n"] = eb.n;
    j["s_n"] = eb.sn;
    j["bound"] = eb.bound;
    j["ray_verified"] = eb.ray_verified;
    j["max_observed_segment"] = eb.max_observed_segment;
    j["window"] = {eb.window_lo, eb.window_hi};
    j["sampling"] = {{"x1_samples", eb.sampling.x1_samples},
                     {"transverse_per_axis", eb.sampling.transverse_per_axis}};
    j["reports_purely_discrete"] = eb.reports_purely_discrete;
    return j;
}

json bracket_json(const BracketReport& br) {
    json j;
    j["n"] = br.n;
    j["s_n"] = br.sn;
    j["bound"] = br.bound;
    j["ray_verified"] = br.ray_verified;
    j["L"] = br.L;
    j["h"] = br.h;
    j["h1"] = br.h1;
    j["lower"] = br.lower;
    j["upper"] = br.upper;
    std::vector<bool> valid(br.valid.begin(), br.valid.end());
    j["valid"] = valid;
    j["note"] = br.note;
    return j;
}

}  // namespace

int run_certify(const ExperimentConfig& cfg, const RunOptions& opt) {
    const CrossSection& omega = require_shape(cfg);
    const std::uint64_t seed = effective_seed(cfg, opt);
    const GeometrySummary geom = summary(omega);
    const RaySampling sampling{cfg.ray_x1_samples, cfg.ray_transverse};

    json root;
    root["geometry"] = geometry_json(geom);

    std::vector<int> ns = cfg.n_list;
    if (ns.empty()) ns.push_back(cfg.n);

    auto run_essential = [&]() {
        const TwistProfile& profile = require_profile(cfg);
        json bounds = json::array();
        for (int n : ns)
            bounds.push_back(essential_bound_json(
                essential_lower_bound(omega, profile, n, sampling, cfg.ray_tol,
                                      cfg.horizon)));
        root["essential_bounds"] = bounds;
        if (cfg.L) {
            root["bracket"] = bracket_json(
                bracket_eigenvalues(omega, profile, cfg.h, cfg.h1, *cfg.L, cfg.n,
                                    cfg.k, cfg.tol, seed, cfg.max_iter, sampling));
        }
    };

    if (cfg.mode == "thm1") {
        const Thm1Window w = thm1_window(geom);
        root["thm1_window"] = {{"r", w.r}, {"mu1", w.mu1}, {"claim", w.claim}};
    } else if (cfg.mode == "thm2") {
        run_essential();
    } else {  // auto: route on the hypotheses
        if (geom.contains_origin) {
            const Thm1Window w = thm1_window(geom);
            root["thm1_window"] = {{"r", w.r}, {"mu1", w.mu1}, {"claim", w.claim}};
            root["essential_bound_refused"] =
                "HalfPlaneViolated: the origin is interior to omega, so the "
                "essential spectrum contains [mu1, inf) by the embedded cylinder";
        } else if (geom.m > 0.0) {
            run_essential();
        } else {
            root["thm1_window_refused"] = "NoOrigin: origin not interior to omega";
            root["essential_bound_refused"] =
                "HalfPlaneViolated: omega does not lie in the half-plane t1 > 0";
        }
    }

    auto out = open_out(opt, "certify.json");
    out << root.dump(2) << '\n';
    return 0;
}

int run_geometry(const ExperimentConfig& cfg, const RunOptions& opt) {
    const CrossSection& omega = require_shape(cfg);
    const TwistProfile& profile = require_profile(cfg);

    double x1_lo = cfg.x1_min.value_or(cfg.L ? -*cfg.L : -5.0);
    double x1_hi = cfg.x1_max.value_or(cfg.L ? *cfg.L : 5.0);
    if (!(x1_hi > x1_lo)) throw ConfigError("geometry needs x1_max > x1_min");

    // Surface mesh: rings of the cross-section boundary swept by the tube map.
    {
        auto out = open_out(opt, "tube.vtk");
        const int ns = cfg.slices, nb = cfg.boundary_samples;
        const auto ring = omega.boundary_polyline(nb);
        out << "# vtk DataFile Version 3.0\n";
        out << "twisted tube surface\n";
        out << "ASCII\n";
        out << "DATASET POLYDATA\n";
        out << "POINTS " << ns * nb << " double\n";
        for (int i = 0; i < ns; ++i) {
            const double x1 = x1_lo + (x1_hi - x1_lo) * i / (ns - 1);
            for (const Vec2& t : ring) {
                const Vec3 p = map_point(profile, {x1, t.x, t.y});
                out << fmt17(p.x1) << ' ' << fmt17(p.x2) << ' ' << fmt17(p.x3) << '\n';
            }
        }
        const int ntri = (ns - 1) * nb * 2;
        out << "POLYGONS " << ntri << ' ' << ntri * 4 << '\n';
        for (int i = 0; i + 1 < ns; ++i)
            for (int j = 0; j < nb; ++j) {
                const int a = i * nb + j;
                const int b = i * nb + (j + 1) % nb;
                const int c = (i + 1) * nb + j;
                const int d = (i + 1) * nb + (j + 1) % nb;
                out << "3 " << a << ' ' << b << ' ' << d << '\n';
                out << "3 " << a << ' ' << d << ' ' << c << '\n';
            }
    }

    // Quasi-boundedness probe.
    {
        std::vector<double> stations = cfg.stations;
        if (stations.empty())
            for (int i = 0; i < 8; ++i)
                stations.push_back(x1_lo + (x1_hi - x1_lo) * i / 7.0);
        const RaySampling sampling{cfg.ray_x1_samples, cfg.ray_transverse};
        const auto bounds = quasibounded_probe(omega, profile, stations, sampling,
                                               cfg.ray_tol, cfg.horizon);
        auto out = open_out(opt, "probe.csv");
        out << "x1,dist_upper_bound\n";
        for (size_t i = 0; i < stations.size(); ++i)
            out << fmt17(stations[i]) << ',' << fmt17(bounds[i]) << '\n';
    }
    return 0;
}

namespace {

SparseSym stencil_1d(int n, double h) {
    std::vector<SparseSym::Triplet> t;
    const double w = 1.0 / (h * h);
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0 * w});
        if (i > 0) t.push_back({i, i - 1, -w});
    }
    return SparseSym::from_triplets(n, t);
}

/// Small operators spanning every module, all of order <= 1500.
std::vector<std::pair<std::string, SparseSym>> oracle_bundle() {
    std::vector<std::pair<std::string, SparseSym>> ops;

    {
        std::vector<SparseSym::Triplet> t;
        for (int i = 0; i < 50; ++i) t.push_back({i, i, 1.0});
        ops.emplace_back("identity_50", SparseSym::from_triplets(50, t));
    }
    ops.emplace_back("stencil1d_10", stencil_1d(10, 1.0));
    ops.emplace_back("stencil1d_200", stencil_1d(200, 0.1));

    const CrossSection square = CrossSection::rectangle({0, 0}, {1, 1});
    const CrossSection offset_square = CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5});
    const CrossSection disc = CrossSection::ellipse({0, 0}, 1, 1);
    const CrossSection tri =
        CrossSection::polygon({{0.3, -0.4}, {1.4, -0.1}, {0.5, 0.8}});

    ops.emplace_back("xsection_square_b0",
                     assemble_xsection(build_grid(square, 1.0 / 16), 0.0).matrix);
    ops.emplace_back("xsection_offset_square_b2",
                     assemble_xsection(build_grid(offset_square, 1.0 / 16), 2.0).matrix);
    ops.emplace_back("xsection_disc_b3",
                     assemble_xsection(build_grid(disc, 1.0 / 12), 3.0).matrix);
    ops.emplace_back("xsection_polygon_b1",
                     assemble_xsection(build_grid(tri, 1.0 / 16), 1.0).matrix);

    const TransverseGrid tg = build_grid(offset_square, 0.25);
    const TwistProfile straight = TwistProfile::constant(0.0);
    const TwistProfile twisted = TwistProfile::linear_rate(1.0);
    ops.emplace_back(
        "tube_straight_dirichlet",
        assemble_tube(tg, longitudinal_grid(2.0, 0.25, EndCondition::Dirichlet),
                      straight)
            .matrix);
    ops.emplace_back(
        "tube_twisted_dirichlet",
        assemble_tube(tg, longitudinal_grid(2.0, 0.25, EndCondition::Dirichlet),
                      twisted)
            .matrix);
    ops.emplace_back(
        "tube_twisted_neumann",
        assemble_tube(tg, longitudinal_grid(2.0, 0.25, EndCondition::Neumann), twisted)
            .matrix);

    {
        // Seeded random sparse symmetric matrix (diagonally shifted).
        detail::Xorshift64Star rng(12345);
        std::vector<SparseSym::Triplet> t;
        const int n = 300;
        for (int i = 0; i < n; ++i) t.push_back({i, i, 4.0 + rng.uniform_pm1()});
        for (int e = 0; e < 900; ++e) {
            const int i = static_cast<int>(rng.next() % n);
            const int j = static_cast<int>(rng.next() % n);
            if (i == j) continue;
            t.push_back({i, j, 0.3 * rng.uniform_pm1()});
        }
        ops.emplace_back("random_sym_300", SparseSym::from_triplets(n, t));
    }
    return ops;
}

}  // namespace

int run_oracle(const ExperimentConfig& cfg, const RunOptions& opt) {
    const std::uint64_t seed = effective_seed(cfg, opt);
    const double check_tol = 1e-8;
    auto out = open_out(opt, "oracle.csv");
    out << "name,order,k,max_scaled_diff,status\n";
    bool all_pass = true;

    auto check = [&](const std::string& name, const SparseSym& A,
                     const std::vector<double>& reference, bool genuine) {
        const int k = std::min(3, A.order());
        const EigResult it = lobpcg(A, k, 1e-9, cfg.max_iter, seed);
        double worst = 0.0;
        for (int j = 0; j < k; ++j) {
            const double ref = reference[static_cast<size_t>(j)];
            worst = std::max(worst, std::abs(it.eigenvalues[static_cast<size_t>(j)] -
                                             ref) /
                                        (1.0 + std::abs(ref)));
        }
        const bool pass = worst <= check_tol && it.all_converged();
        out << name << ',' << A.order() << ',' << k << ',' << fmt17(worst) << ','
            << (pass ? "pass" : "fail") << '\n';
        if (genuine) all_pass &= pass;
    };

    for (const auto& [name, A] : oracle_bundle()) check(name, A, dense_eig(A), true);

    if (cfg.include_negative_control) {
        // Negative control: the reference spectrum belongs to the
        // untampered matrix, so the check must fail and name the matrix.
        SparseSym A = stencil_1d(10, 1.0);
        const std::vector<double> ref = dense_eig(A);
        A.mutable_values()[0] += 0.5;
        check("tampered_negative_control", A, ref, false);
    }
    return all_pass ? 0 : 1;
}

int main_entry(int argc, const char* const* argv) {
    try {
        if (argc < 2) throw ConfigError(
            "usage: twistspec <xsection|spectrum|certify|geometry|oracle> "
            "--config FILE [--seed N] [--out DIR] [--jobs N]");
        const std::string sub = argv[1];
        RunOptions opt;
        std::string config_path;
        for (int i = 2; i < argc; ++i) {
            const std::string a = argv[i];
            auto next = [&]() -> std::string {
                if (i + 1 >= argc) throw ConfigError("missing value for " + a);
                return argv[++i];
            };
            if (a == "--config")
                config_path = next();
            else if (a == "--seed")
                opt.seed_override = std::stoull(next());
            else if (a == "--out")
                opt.out_dir = next();
            else if (a == "--jobs")
                opt.jobs = std::stoi(next());
            else
                throw ConfigError("unknown flag: " + a);
        }
        if (config_path.empty()) throw ConfigError("--config is required");
        const ExperimentConfig cfg = parse_config_file(config_path);

        if (sub == "xsection") return run_xsection(cfg, opt);
        if (sub == "spectrum") return run_spectrum(cfg, opt);
        if (sub == "certify") return run_certify(cfg, opt);
        if (sub == "geometry") return run_geometry(cfg, opt);
        if (sub == "oracle") return run_oracle(cfg, opt);
        throw ConfigError("unknown subcommand: " + sub);
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis violation: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace twistspec::cli
