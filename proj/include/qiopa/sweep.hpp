#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qiopa/config.hpp"
#include "qiopa/detection.hpp"
#include "qiopa/gaussian.hpp"

namespace qiopa {

struct SweepRow {
    std::vector<std::optional<double>> cells;
    std::string error;
};

/// Column-oriented sweep result; rows are in deterministic row-major
/// axis order regardless of the evaluation schedule.
struct SweepTable {
    std::vector<std::string> provenance; ///< emitted as leading '#' lines
    std::vector<std::string> columns;    ///< value columns; 'error' is appended at emission
    std::size_t n_axis_columns{};
    std::vector<SweepRow> rows;
};

namespace detail {

inline std::vector<double> grid_linear(double lo, double hi, int steps) {
    std::vector<double> v(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        v[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
    return v;
}

inline std::vector<double> grid_log(double lo, double hi, int steps) {
    std::vector<double> v(static_cast<std::size_t>(steps));
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < steps; ++i)
        v[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / (steps - 1));
    return v;
}

/// Evaluate fn(0..n-1) on a worker pool; results must be written into
/// pre-sized storage indexed by the loop variable so that output order
/// does not depend on the schedule.
template <typename Fn>
inline void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    if (jobs < 1) jobs = 1;
    if (jobs == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

struct ObservableRequest {
    bool entanglement{};
    bool photon{};
    bool detection{};
    bool coherent{};
};

struct PointObservables {
    bool stable{};
    std::optional<double> E_N, n_ow, n_wo, snr, p, log10_p, snr_coh, p_coh, log10_p_coh;
    std::string error;
};

inline PointObservables evaluate_point(const PhysicalParams& p, const ScenarioParams& sc,
                                       double omega, const ObservableRequest& req,
                                       ErrorModel model) {
    PointObservables out;
    try {
        const DerivedParams d = derive(p);
        const StabilityReport rep = stability(p, d);
        out.stable = rep.stable;
        if (!rep.stable) return out; // never fabricate observables off the stationary regime
        const bool need_plus = req.entanglement || req.photon || req.detection || req.coherent;
        if (!need_plus) return out;
        const OutputCoefficients plus = output_coefficients(p, d, omega);
        if (req.entanglement) {
            const OutputCoefficients minus = output_coefficients(p, d, -omega);
            const CovarianceMatrix v = assemble_covariance(plus, minus, d.n_w_T, d.n_o_T, d.n_b_T);
            out.E_N = log_negativity(v).E_N;
        }
        if (req.photon) {
            const PhotonNumbers n = photon_numbers(plus, d.n_w_T, d.n_o_T, d.n_b_T);
            out.n_ow = n.n_o_given_w;
            out.n_wo = n.n_w_given_o;
        }
        if (req.detection || req.coherent) {
            const DetectionStats st = detect(p, d, omega, sc, model);
            if (req.detection) {
                out.snr = st.snr;
                out.p = st.p_err;
                out.log10_p = st.log10_p_err;
            }
            if (req.coherent) {
                out.snr_coh = st.snr_coh;
                out.p_coh = st.p_coh;
                out.log10_p_coh = st.log10_p_coh;
            }
        }
    } catch (const PhysicsError& e) {
        out.error = e.what();
    } catch (const NumericError& e) {
        out.error = e.what();
    }
    return out;
}

inline const char* error_model_name(ErrorModel m) {
    return m == ErrorModel::AsPrinted ? "as-printed" : "sqrt-form";
}

inline void append_config_provenance(std::vector<std::string>& prov, const SweepSpec& spec,
                                     ErrorModel model) {
    prov.push_back(std::string("error_model = ") + error_model_name(model));
    std::istringstream cfg(serialize_config(spec));
    std::string line;
    while (std::getline(cfg, line))
        if (!line.empty()) prov.push_back(line);
}

} // namespace detail

/// Run the configured sweep.  Unstable grid points carry stable = 0 and
/// empty observable cells; per-point physics failures are recorded in the
/// row's error column and the sweep continues.
inline SweepTable run_sweep(const SweepSpec& spec, int jobs = 1,
                            ErrorModel model = ErrorModel::AsPrinted) {
    detail::ObservableRequest req;
    bool want_p = false, want_pcoh = false, want_snr = false, want_snrcoh = false;
    for (const auto& o : spec.outputs) {
        if (o == "E_N") req.entanglement = true;
        if (o == "n(o|w)" || o == "n(w|o)") req.photon = true;
        if (o == "SNR" || o == "P") req.detection = true;
        if (o == "SNR_coh" || o == "P_coh") req.coherent = true;
        want_snr = want_snr || o == "SNR";
        want_p = want_p || o == "P";
        want_snrcoh = want_snrcoh || o == "SNR_coh";
        want_pcoh = want_pcoh || o == "P_coh";
    }

    SweepTable table;
    table.provenance.push_back("qi-opa sweep");
    detail::append_config_provenance(table.provenance, spec, model);

    std::vector<std::vector<double>> grids;
    for (const auto& ax : spec.axes) {
        grids.push_back(ax.log_scale ? detail::grid_log(ax.min, ax.max, ax.steps)
                                     : detail::grid_linear(ax.min, ax.max, ax.steps));
        table.columns.push_back(ax.name);
    }
    table.n_axis_columns = spec.axes.size();

    table.columns.push_back("stable");
    if (req.entanglement) table.columns.push_back("E_N");
    if (req.photon) {
        table.columns.push_back("n_o_given_w");
        table.columns.push_back("n_w_given_o");
    }
    if (want_snr) table.columns.push_back("SNR");
    if (want_p) {
        table.columns.push_back("P");
        table.columns.push_back("log10_P");
    }
    if (want_snrcoh) table.columns.push_back("SNR_coh");
    if (want_pcoh) {
        table.columns.push_back("P_coh");
        table.columns.push_back("log10_P_coh");
    }

    std::size_t n_rows = 1;
    for (const auto& g : grids) n_rows *= g.size();
    table.rows.resize(n_rows);

    detail::parallel_for(n_rows, jobs, [&](std::size_t idx) {
        PhysicalParams p = spec.base;
        ScenarioParams sc = spec.scenario;
        double omega = spec.omega_eval;

        std::vector<double> axis_values(spec.axes.size());
        std::size_t rem = idx;
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            const std::size_t n = grids[a].size();
            axis_values[a] = grids[a][rem % n];
            rem /= n;
        }
        for (std::size_t a = 0; a < spec.axes.size(); ++a) {
            const std::string& name = spec.axes[a].name;
            const double v = axis_values[a];
            if (name == "G") p.G = v;
            else if (name == "theta") p.theta = reduce_angle(v);
            else if (name == "omega") omega = v;
            else if (name == "M") sc.M = v;
            else if (name == "eta") sc.eta = v;
            else if (name == "n_B") sc.n_B = v;
            else if (name == "P_w") p.P_w = v;
            else if (name == "P_o") p.P_o = v;
            else if (name == "kappa_w") p.kappa_w = v;
            else if (name == "kappa_o") p.kappa_o = v;
        }

        const auto obs = detail::evaluate_point(p, sc, omega, req, model);
        SweepRow row;
        for (double v : axis_values) row.cells.emplace_back(v);
        row.cells.emplace_back(obs.stable ? 1.0 : 0.0);
        if (req.entanglement) row.cells.push_back(obs.E_N);
        if (req.photon) {
            row.cells.push_back(obs.n_ow);
            row.cells.push_back(obs.n_wo);
        }
        if (want_snr) row.cells.push_back(obs.snr);
        if (want_p) {
            row.cells.push_back(obs.p);
            row.cells.push_back(obs.log10_p);
        }
        if (want_snrcoh) row.cells.push_back(obs.snr_coh);
        if (want_pcoh) {
            row.cells.push_back(obs.p_coh);
            row.cells.push_back(obs.log10_p_coh);
        }
        row.error = obs.error;
        table.rows[idx] = std::move(row);
    });
    return table;
}

/// Render a table as CSV: '#'-prefixed provenance block, header row,
/// then one row per grid point with 17-significant-digit values and
/// empty cells where no observable exists.
inline std::string to_csv(const SweepTable& table) {
    std::string out;
    for (const auto& line : table.provenance) {
        out += "# ";
        out += line;
        out += "\n";
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ",";
        out += table.columns[c];
    }
    out += ",error\n";
    char buf[64];
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.cells.size(); ++c) {
            if (c) out += ",";
            if (row.cells[c]) {
                std::snprintf(buf, sizeof(buf), "%.17g", *row.cells[c]);
                out += buf;
            }
        }
        out += ",";
        std::string err = row.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        out += err;
        out += "\n";
    }
    return out;
}

inline bool any_observable_populated(const SweepTable& table) {
    for (const auto& row : table.rows)
        for (std::size_t c = table.n_axis_columns + 1; c < row.cells.size(); ++c)
            if (row.cells[c]) return true;
    return false;
}

namespace detail {

inline const std::vector<double>& figure_g_family() {
    static const std::vector<double> f = {0.0, 0.5, 1.0, 1.7};
    return f;
}

inline const std::vector<std::string>& figure_g_labels() {
    static const std::vector<std::string> l = {"G0.0", "G0.5", "G1.0", "G1.7"};
    return l;
}

inline void base_provenance(std::vector<std::string>& prov, const std::string& name,
                            const PhysicalParams& p, ErrorModel model) {
    prov.push_back("qi-opa dataset");
    prov.push_back("figure = " + name);
    prov.push_back(std::string("error_model = ") + error_model_name(model));
    auto kv = [&](const char* k, double v) { prov.push_back(std::string(k) + " = " + format_double(v)); };
    kv("omega_m", p.omega_m);
    kv("omega_w", p.omega_w);
    kv("lambda_o", p.lambda_o);
    kv("Q_m", p.Q_m);
    kv("kappa_w", p.kappa_w);
    kv("kappa_o", p.kappa_o);
    kv("delta_w", p.delta_w);
    kv("delta_o", p.delta_o);
    kv("g_w", p.g_w_bare);
    kv("g_o", p.g_o_bare);
    kv("P_w", p.P_w);
    kv("P_o", p.P_o);
    kv("T", p.T);
}

inline void scenario_provenance(std::vector<std::string>& prov, const ScenarioParams& sc) {
    prov.push_back("eta = " + format_double(sc.eta));
    prov.push_back("M = " + format_double(sc.M));
    prov.push_back("n_B = " + format_double(sc.n_B));
}

inline void merge_error(std::string& dest, const std::string& column, const std::string& err) {
    if (err.empty()) return;
    if (!dest.empty()) dest += "; ";
    dest += column + ": " + err;
}

/// Map over the (row x family) product grid and lay the family out as
/// wide columns, one value per family member per row.
struct FamilyResult {
    std::vector<std::vector<PointObservables>> cells; // [row][family]
};

template <typename MakePoint>
inline FamilyResult family_map(std::size_t n_rows, std::size_t n_family, int jobs,
                               const ObservableRequest& req, ErrorModel model, MakePoint&& make) {
    FamilyResult res;
    res.cells.assign(n_rows, std::vector<PointObservables>(n_family));
    parallel_for(n_rows * n_family, jobs, [&](std::size_t idx) {
        const std::size_t r = idx / n_family;
        const std::size_t f = idx % n_family;
        auto [p, sc, omega] = make(r, f);
        res.cells[r][f] = evaluate_point(p, sc, omega, req, model);
    });
    return res;
}

} // namespace detail

inline const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> names = {"fig2",  "fig3a", "fig3b", "fig3c", "fig3d",
                                                   "fig4a", "fig4b", "fig4c", "fig4d", "fig5a",
                                                   "fig5b", "fig6a", "fig6b"};
    return names;
}

/// Built-in figure datasets.  Each encodes the operating parameters of
/// one published panel; grid resolutions are 101x101 for maps and 201
/// for curves, recorded in the provenance block.
inline SweepTable figure_table(const std::string& name, int jobs = 1,
                               ErrorModel model = ErrorModel::AsPrinted) {
    const SweepSpec defaults = default_spec();
    PhysicalParams base = defaults.base;
    ScenarioParams scenario = defaults.scenario;
    const double wm = base.omega_m;
    const double ko = base.kappa_o;

    SweepTable t;
    using detail::ObservableRequest;

    auto map_grid = [&](const std::vector<double>& gline, const std::vector<double>& thline,
                        const ObservableRequest& req, const ScenarioParams& sc, double omega) {
        detail::FamilyResult res = detail::family_map(
            gline.size(), thline.size(), jobs, req, model, [&](std::size_t r, std::size_t f) {
                PhysicalParams p = base;
                p.G = gline[r] * ko;
                p.theta = reduce_angle(thline[f] * constants::two_pi);
                return std::tuple<PhysicalParams, ScenarioParams, double>(p, sc, omega);
            });
        return res;
    };

    if (name == "fig2" || name == "fig3a" || name == "fig4a" || name == "fig4b") {
        const auto gline = detail::grid_linear(0.0, 2.0, 101);
        const auto thline = detail::grid_linear(0.0, 1.0, 101);
        ObservableRequest req;
        req.entanglement = (name == "fig3a");
        req.detection = (name == "fig4a" || name == "fig4b");
        const double omega = wm;
        detail::base_provenance(t.provenance, name, base, model);
        if (req.detection) detail::scenario_provenance(t.provenance, scenario);
        t.provenance.push_back("omega = omega_m");
        t.provenance.push_back("grid = G/kappa_o in [0,2] x 101, theta/2pi in [0,1] x 101");
        t.columns = {"G_over_kappa_o", "theta_over_2pi", "stable"};
        if (name == "fig3a") t.columns.push_back("E_N");
        if (name == "fig4a") t.columns.push_back("SNR");
        if (name == "fig4b") {
            t.columns.push_back("P");
            t.columns.push_back("log10_P");
        }
        t.n_axis_columns = 2;
        const auto res = map_grid(gline, thline, req, scenario, omega);
        for (std::size_t r = 0; r < gline.size(); ++r) {
            for (std::size_t f = 0; f < thline.size(); ++f) {
                const auto& o = res.cells[r][f];
                SweepRow row;
                row.cells = {gline[r], thline[f], o.stable ? 1.0 : 0.0};
                if (name == "fig3a") row.cells.push_back(o.E_N);
                if (name == "fig4a") row.cells.push_back(o.snr);
                if (name == "fig4b") {
                    row.cells.push_back(o.p);
                    row.cells.push_back(o.log10_p);
                }
                row.error = o.error;
                t.rows.push_back(std::move(row));
            }
        }
        return t;
    }

    if (name == "fig3b" || name == "fig4c" || name == "fig4d") {
        const auto wline = detail::grid_linear(0.5, 1.5, 201);
        const auto& gfam = detail::figure_g_family();
        const auto& glab = detail::figure_g_labels();
        ObservableRequest req;
        req.entanglement = (name == "fig3b");
        req.detection = (name == "fig4c" || name == "fig4d");
        detail::base_provenance(t.provenance, name, base, model);
        if (req.detection) detail::scenario_provenance(t.provenance, scenario);
        t.provenance.push_back("theta = 0.62 pi");
        t.provenance.push_back("curves = G in {0, 0.5, 1.0, 1.7} kappa_o");
        t.provenance.push_back("grid = omega/omega_m in [0.5,1.5] x 201");
        t.columns = {"omega_over_omega_m"};
        t.n_axis_columns = 1;
        for (const auto& lab : glab) {
            if (name == "fig3b") t.columns.push_back("E_N_" + lab);
            if (name == "fig4c") t.columns.push_back("SNR_" + lab);
            if (name == "fig4d") {
                t.columns.push_back("P_" + lab);
                t.columns.push_back("log10_P_" + lab);
            }
        }
        const auto res = detail::family_map(
            wline.size(), gfam.size(), jobs, req, model, [&](std::size_t r, std::size_t f) {
                PhysicalParams p = base;
                p.G = gfam[f] * ko;
                p.theta = reduce_angle(0.62 * constants::pi);
                return std::tuple<PhysicalParams, ScenarioParams, double>(p, scenario, wline[r] * wm);
            });
        for (std::size_t r = 0; r < wline.size(); ++r) {
            SweepRow row;
            row.cells = {wline[r]};
            for (std::size_t f = 0; f < gfam.size(); ++f) {
                const auto& o = res.cells[r][f];
                if (name == "fig3b") {
                    row.cells.push_back(o.E_N);
                    detail::merge_error(row.error, "E_N_" + glab[f], o.error);
                } else if (name == "fig4c") {
                    row.cells.push_back(o.snr);
                    detail::merge_error(row.error, "SNR_" + glab[f], o.error);
                } else {
                    row.cells.push_back(o.p);
                    row.cells.push_back(o.log10_p);
                    detail::merge_error(row.error, "P_" + glab[f], o.error);
                }
            }
            t.rows.push_back(std::move(row));
        }
        return t;
    }

    if (name == "fig3c" || name == "fig3d") {
        const auto gline = detail::grid_linear(0.0, 1.7, 201);
        ObservableRequest req;
        req.entanglement = (name == "fig3c");
        req.photon = (name == "fig3d");
        detail::base_provenance(t.provenance, name, base, model);
        t.provenance.push_back("theta = 0.62 pi");
        t.provenance.push_back("omega = omega_m");
        t.provenance.push_back("grid = G/kappa_o in [0,1.7] x 201");
        t.columns = {"G_over_kappa_o"};
        t.n_axis_columns = 1;
        if (name == "fig3c") t.columns.push_back("E_N");
        if (name == "fig3d") {
            t.columns.push_back("n_o_given_w");
            t.columns.push_back("n_w_given_o");
        }
        const auto res = detail::family_map(
            gline.size(), 1, jobs, req, model, [&](std::size_t r, std::size_t) {
                PhysicalParams p = base;
                p.G = gline[r] * ko;
                p.theta = reduce_angle(0.62 * constants::pi);
                return std::tuple<PhysicalParams, ScenarioParams, double>(p, scenario, wm);
            });
        for (std::size_t r = 0; r < gline.size(); ++r) {
            const auto& o = res.cells[r][0];
            SweepRow row;
            row.cells = {gline[r]};
            if (name == "fig3c") row.cells.push_back(o.E_N);
            if (name == "fig3d") {
                row.cells.push_back(o.n_ow);
                row.cells.push_back(o.n_wo);
            }
            row.error = o.error;
            t.rows.push_back(std::move(row));
        }
        return t;
    }

    if (name == "fig5a" || name == "fig5b") {
        scenario.eta = 0.05;
        scenario.M = 1e6;
        const bool vs_M = (name == "fig5a");
        const auto xline = vs_M ? detail::grid_log(1e4, 1e6, 201) : detail::grid_linear(0.01, 0.1, 201);
        const auto& gfam = detail::figure_g_family();
        const auto& glab = detail::figure_g_labels();
        ObservableRequest req;
        req.detection = true;
        detail::base_provenance(t.provenance, name, base, model);
        detail::scenario_provenance(t.provenance, scenario);
        t.provenance.push_back("theta = 0.62 pi");
        t.provenance.push_back("omega = 1.02 omega_m");
        t.provenance.push_back("curves = G in {0, 0.5, 1.0, 1.7} kappa_o");
        t.provenance.push_back(vs_M ? "grid = M in [1e4,1e6] x 201 (log)"
                                    : "grid = eta in [0.01,0.1] x 201");
        t.columns = {vs_M ? "M" : "eta"};
        t.n_axis_columns = 1;
        for (const auto& lab : glab) {
            t.columns.push_back("P_" + lab);
            t.columns.push_back("log10_P_" + lab);
        }
        const auto res = detail::family_map(
            xline.size(), gfam.size(), jobs, req, model, [&](std::size_t r, std::size_t f) {
                PhysicalParams p = base;
                p.G = gfam[f] * ko;
                p.theta = reduce_angle(0.62 * constants::pi);
                ScenarioParams sc = scenario;
                (vs_M ? sc.M : sc.eta) = xline[r];
                return std::tuple<PhysicalParams, ScenarioParams, double>(p, sc, 1.02 * wm);
            });
        for (std::size_t r = 0; r < xline.size(); ++r) {
            SweepRow row;
            row.cells = {xline[r]};
            for (std::size_t f = 0; f < gfam.size(); ++f) {
                const auto& o = res.cells[r][f];
                row.cells.push_back(o.p);
                row.cells.push_back(o.log10_p);
                detail::merge_error(row.error, "P_" + glab[f], o.error);
            }
            t.rows.push_back(std::move(row));
        }
        return t;
    }

    if (name == "fig6a" || name == "fig6b") {
        scenario.eta = 0.05;
        scenario.M = 1e6;
        base.G = 1.7 * ko;
        base.theta = reduce_angle(0.62 * constants::pi);
        const bool vs_M = (name == "fig6a");
        const auto xline = vs_M ? detail::grid_log(1e4, 1e6, 201) : detail::grid_linear(0.01, 0.1, 201);
        ObservableRequest req;
        req.detection = true;
        req.coherent = true;
        detail::base_provenance(t.provenance, name, base, model);
        detail::scenario_provenance(t.provenance, scenario);
        t.provenance.push_back("G = 1.7 kappa_o");
        t.provenance.push_back("theta = 0.62 pi");
        t.provenance.push_back("omega = 1.02 omega_m");
        t.provenance.push_back(vs_M ? "grid = M in [1e4,1e6] x 201 (log)"
                                    : "grid = eta in [0.01,0.1] x 201");
        t.columns = {vs_M ? "M" : "eta", "P_qi", "P_coh", "log10_P_qi", "log10_P_coh"};
        t.n_axis_columns = 1;
        const auto res = detail::family_map(
            xline.size(), 1, jobs, req, model, [&](std::size_t r, std::size_t) {
                ScenarioParams sc = scenario;
                (vs_M ? sc.M : sc.eta) = xline[r];
                return std::tuple<PhysicalParams, ScenarioParams, double>(base, sc, 1.02 * wm);
            });
        for (std::size_t r = 0; r < xline.size(); ++r) {
            const auto& o = res.cells[r][0];
            SweepRow row;
            row.cells = {xline[r], o.p, o.p_coh, o.log10_p, o.log10_p_coh};
            row.error = o.error;
            t.rows.push_back(std::move(row));
        }
        return t;
    }

    throw ConfigError("unknown figure name '" + name + "'");
}

} // namespace qiopa
