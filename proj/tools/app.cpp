// Copyright 2026 The collspin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "app.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <complex>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"

#include "collspin/entanglement.hpp"
#include "collspin/errors.hpp"
#include "collspin/parallel.hpp"
#include "collspin/phase_space.hpp"
#include "collspin/semiclassics.hpp"
#include "collspin/steady_state.hpp"
#include "collspin/version.hpp"

namespace collspin::cli {

namespace {

namespace sc = collspin::semiclassics;
using json = nlohmann::ordered_json;
using std::numbers::pi;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Options

struct Options {
    std::string model = "crf";
    double omega = 0.2;
    double gamma = 0.4;
    double h = 0.2;
    double lambda = 0.3;
    std::optional<double> gamma_a;
    double gamma_b = 0.45;
    std::vector<int> n{20};
    std::string sweep;
    std::vector<std::string> observables{"moments"};
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string solver = "auto";
    int phi_grid = 16;
    int grid = 8;
    int count = 64;
    double t_final = 500.0;
    double dt_max = 0.5;
    bool terminal_only = false;
    int theta_res = 0;
    int phi_res = 0;
};

struct Sweep {
    std::string param;
    double lo = 0.0;
    double hi = 0.0;
    int steps = 1;

    double value(int k) const {
        if (steps == 1) return lo;
        return lo + (hi - lo) * static_cast<double>(k) / (steps - 1);
    }
    std::string spec() const {
        return param + ":" + format_number(lo) + ":" + format_number(hi) + ":" + std::to_string(steps);
    }
};

const std::vector<std::string> kObservables{"moments",    "c_r",         "c_phi_grid", "qfunction",
                                            "fixed_points", "eigenvalues", "basins",     "critical_points"};

bool is_lmg(const Options& o) { return o.model == "lmg"; }

double resolved_gamma_a(const Options& o) {
    if (o.gamma_a) return *o.gamma_a;
    return sc::critical_points(o.h, o.lambda).order == sc::TransitionOrder::first ? 0.01 : 0.0;
}

Sweep parse_sweep(const Options& o) {
    Sweep s;
    if (o.sweep.empty()) {
        s.param = is_lmg(o) ? "gamma-b" : "gamma";
        s.lo = s.hi = is_lmg(o) ? o.gamma_b : o.gamma;
        return s;
    }
    std::vector<std::string> parts;
    std::stringstream ss(o.sweep);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 4) throw UsageError("--sweep expects param:min:max:steps, got '" + o.sweep + "'");
    s.param = parts[0];
    const std::vector<std::string> allowed =
        is_lmg(o) ? std::vector<std::string>{"h", "lambda", "gamma-a", "gamma-b"}
                  : std::vector<std::string>{"omega", "gamma"};
    if (std::find(allowed.begin(), allowed.end(), s.param) == allowed.end()) {
        throw UsageError("--sweep: '" + s.param + "' is not a parameter of the " + o.model + " model");
    }
    auto number = [&](const std::string& text, auto& dest) {
        const auto* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, dest);
        if (ec != std::errc() || ptr != end) throw UsageError("--sweep: bad number '" + text + "'");
    };
    number(parts[1], s.lo);
    number(parts[2], s.hi);
    number(parts[3], s.steps);
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi)) throw UsageError("--sweep: range must be finite");
    if (s.steps < 1) throw UsageError("--sweep: steps must be >= 1");
    return s;
}

void apply_value(Options& o, const std::string& param, double v) {
    if (param == "omega") o.omega = v;
    else if (param == "gamma") o.gamma = v;
    else if (param == "h") o.h = v;
    else if (param == "lambda") o.lambda = v;
    else if (param == "gamma-a") o.gamma_a = v;
    else if (param == "gamma-b") o.gamma_b = v;
}

CrfParams crf_params(const Options& o, int n) { return CrfParams{o.omega, o.gamma, n}; }
LmgParams lmg_params(const Options& o, int n) {
    return LmgParams{o.h, o.lambda, resolved_gamma_a(o), o.gamma_b, n};
}

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string render_csv(const Table& t) {
    std::string s;
    for (const auto& [k, v] : t.metadata) s += "# " + k + " = " + v + "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) s += (c ? "," : "") + t.columns[c];
    s += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) s += ",";
            if (const auto* d = std::get_if<double>(&row[c])) s += format_number(*d);
            else s += std::get<std::string>(row[c]);
        }
        s += "\n";
    }
    return s;
}

json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(nullptr);
    return std::get<std::string>(c);
}

std::string render_json(const Table& t) {
    json doc;
    json meta = json::object();
    for (const auto& [k, v] : t.metadata) meta[k] = v;
    doc["metadata"] = meta;
    doc["columns"] = t.columns;
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& c : row) r.push_back(cell_json(c));
        rows.push_back(r);
    }
    doc["rows"] = rows;
    return doc.dump(1) + "\n";
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

std::vector<std::pair<std::string, std::string>> base_metadata(const Options& o, const std::string& cmd) {
    std::vector<std::string> ns;
    for (int n : o.n) ns.push_back(std::to_string(n));
    return {{"tool", "collspin"},
            {"version", kVersion},
            {"command", cmd},
            {"model", o.model},
            {"omega", format_number(o.omega)},
            {"gamma", format_number(o.gamma)},
            {"h", format_number(o.h)},
            {"lambda", format_number(o.lambda)},
            {"gamma_a", format_number(resolved_gamma_a(o))},
            {"gamma_b", format_number(o.gamma_b)},
            {"n", join(ns)},
            {"seed", std::to_string(o.seed)}};
}

// Writes through a sibling temporary so a failed run leaves nothing behind.
class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {
        if (path_.empty()) return;
        tmp_ = path_ + ".partial";
        file_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!file_) throw UsageError("cannot write to '" + path_ + "'");
    }
    ~Output() {
        if (!committed_ && !path_.empty()) {
            file_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }
    void commit(const std::string& content) {
        if (path_.empty()) {
            fallback_ << content;
            fallback_.flush();
            committed_ = true;
            return;
        }
        file_ << content;
        file_.close();
        if (!file_) throw std::runtime_error("write to '" + tmp_ + "' failed");
        std::filesystem::rename(tmp_, path_);
        committed_ = true;
    }

private:
    std::string path_;
    std::string tmp_;
    std::ostream& fallback_;
    std::ofstream file_;
    bool committed_ = false;
};

std::string error_code(const std::exception& e) {
    if (dynamic_cast<const NoSteadyState*>(&e)) return "no-steady-state";
    if (dynamic_cast<const DegenerateSteadyState*>(&e)) return "degenerate-steady-state";
    if (dynamic_cast<const ConditioningError*>(&e)) return "conditioning";
    if (dynamic_cast<const IntegrationError*>(&e)) return "integration-failure";
    if (dynamic_cast<const InconsistentMoments*>(&e)) return "inconsistent-moments";
    if (dynamic_cast<const InvalidParameter*>(&e)) return "invalid-parameter";
    if (dynamic_cast<const InvalidState*>(&e)) return "invalid-state";
    return "error";
}

SteadyStateResult solve(const Options& o, int n, const DickeOperatorSet& ops) {
    if (!is_lmg(o)) {
        const CrfParams p = crf_params(o, n);
        if (o.solver != "nullspace" && p.gamma > 0.0) return crf_exact_steady_state(p, ops);
        return steady_state(build_crf(p, ops));
    }
    return steady_state(build_lmg(lmg_params(o, n), ops));
}

// ---------------------------------------------------------------------------
// sweep

bool wants(const Options& o, const char* name) {
    return std::find(o.observables.begin(), o.observables.end(), name) != o.observables.end();
}

std::vector<std::string> sweep_columns(const Options& o, const Sweep& s) {
    std::vector<std::string> c{"model", s.param, "n", "status"};
    auto add = [&](std::initializer_list<const char*> names) { c.insert(c.end(), names.begin(), names.end()); };
    if (wants(o, "moments")) add({"jx", "jy", "jz", "jx2", "jy2", "jz2", "z"});
    if (wants(o, "c_r")) add({"c_r"});
    if (wants(o, "c_phi_grid")) {
        add({"c_phi_max", "c_phi_argmax"});
        for (int k = 0; k < o.phi_grid; ++k) c.push_back("c_phi_" + std::to_string(k));
    }
    if (wants(o, "qfunction")) add({"q_peaks", "q_max", "q_max_theta", "q_max_phi", "q_norm"});
    if (wants(o, "fixed_points")) add({"fp_count", "fp_stable", "fp_x", "fp_y", "fp_z"});
    if (wants(o, "eigenvalues")) {
        if (is_lmg(o)) {
            add({"trivial_mu_plus_re", "trivial_mu_plus_im", "trivial_mu_minus_re", "trivial_mu_minus_im",
                 "broken_mu_plus_re", "broken_mu_plus_im", "broken_mu_minus_re", "broken_mu_minus_im"});
        } else {
            add({"mu_plus_re", "mu_plus_im", "mu_minus_re", "mu_minus_im"});
        }
    }
    if (wants(o, "basins")) add({"basin_trivial", "basin_broken_plus", "basin_broken_minus", "basin_unclassified"});
    if (wants(o, "critical_points")) {
        add({"gamma_b_crit", "gamma_b_dd", "order", "window_lo", "window_hi", "jump_lower", "jump_upper"});
    }
    const bool quantum = wants(o, "moments") || wants(o, "c_r") || wants(o, "c_phi_grid") || wants(o, "qfunction");
    if (quantum) add({"method", "residual", "gap_ratio"});
    return c;
}

std::vector<Cell> sweep_row(const Options& o, const Sweep& s, double value, int n) {
    std::vector<Cell> row{o.model, value, static_cast<double>(n), std::string("ok")};
    auto push = [&row](std::initializer_list<double> v) { row.insert(row.end(), v.begin(), v.end()); };

    const bool quantum = wants(o, "moments") || wants(o, "c_r") || wants(o, "c_phi_grid") || wants(o, "qfunction");
    std::optional<SteadyStateResult> ss;
    std::optional<MomentSet> m;
    if (quantum) {
        const auto ops = build_operators(n);
        ss = solve(o, n, ops);
        m = moments(ss->rho, ops);
    }
    if (wants(o, "moments")) {
        push({m->first[0], m->first[1], m->first[2], m->second(0, 0), m->second(1, 1), m->second(2, 2),
              m->first[2] / m->j()});
    }
    if (wants(o, "c_r")) push({rescaled_concurrence(*m)});
    if (wants(o, "c_phi_grid")) {
        const auto sweep = phi_sweep(*m, std::max(8, o.phi_grid));
        push({sweep.max_value, sweep.argmax_phi});
        for (int k = 0; k < o.phi_grid; ++k) push({c_phi(*m, pi * k / o.phi_grid)});
    }
    if (wants(o, "qfunction")) {
        const auto q = q_function(ss->rho);
        const auto peaks = peak_census(q);
        push({static_cast<double>(peaks.size()), peaks.front().value, peaks.front().theta,
              peaks.front().phi, q.normalization()});
    }
    if (wants(o, "fixed_points")) {
        std::vector<sc::BlochFixedPoint> pts;
        if (is_lmg(o)) pts = sc::lmg_fixed_points(lmg_params(o, n));
        else pts = sc::crf_fixed_points(crf_params(o, n)).points;
        const sc::BlochFixedPoint* best = nullptr;
        int stable = 0;
        for (const auto& p : pts) {
            if (p.stability != sc::Stability::stable_node && p.stability != sc::Stability::stable_focus) continue;
            ++stable;
            if (!best || p.state.x > best->state.x) best = &p;
        }
        push({static_cast<double>(pts.size()), static_cast<double>(stable), best ? best->state.x : kNaN,
              best ? best->state.y : kNaN, best ? best->state.z : kNaN});
    }
    if (wants(o, "eigenvalues")) {
        auto push_pair = [&](const std::optional<std::array<std::complex<double>, 2>>& mu) {
            if (mu) push({(*mu)[0].real(), (*mu)[0].imag(), (*mu)[1].real(), (*mu)[1].imag()});
            else push({kNaN, kNaN, kNaN, kNaN});
        };
        if (is_lmg(o)) {
            const auto p = lmg_params(o, n);
            push_pair(sc::lmg_eigenvalues_analytic(p, sc::Branch::trivial));
            std::optional<std::array<std::complex<double>, 2>> broken;
            try {
                broken = sc::lmg_eigenvalues_analytic(p, sc::Branch::broken_plus);
            } catch (const InvalidBranch&) {
            }
            push_pair(broken);
        } else {
            const auto fps = sc::crf_fixed_points(crf_params(o, n));
            if (fps.points.empty()) push_pair(std::nullopt);
            else push_pair(fps.points[0].eigenvalues);
        }
    }
    if (wants(o, "basins")) {
        sc::BasinOptions bo;
        bo.t_final = o.t_final;
        bo.dt_max = o.dt_max;
        bo.workers = 1;
        const auto map = sc::basin_map(lmg_params(o, n), o.grid, bo);
        const double total = static_cast<double>(map.samples.size());
        push({map.count(sc::Branch::trivial) / total, map.count(sc::Branch::broken_plus) / total,
              map.count(sc::Branch::broken_minus) / total, map.count(std::nullopt) / total});
    }
    if (wants(o, "critical_points")) {
        const auto d = sc::critical_points(o.h, o.lambda);
        push({d.gamma_b_crit, d.gamma_b_dd.value_or(kNaN)});
        row.emplace_back(std::string(sc::to_string(d.order)));
        push({d.bistable_window ? d.bistable_window->first : kNaN,
              d.bistable_window ? d.bistable_window->second : kNaN, d.jump_lower, d.jump_upper});
    }
    if (quantum) {
        row.emplace_back(std::string(to_string(ss->method)));
        push({ss->residual, ss->gap_ratio});
    }
    (void)s;
    return row;
}

int cmd_sweep(const Options& base, std::ostream& out, std::ostream& err) {
    if (base.observables.empty()) throw UsageError("--observables must not be empty");
    if (!is_lmg(base) && (wants(base, "basins") || wants(base, "critical_points"))) {
        throw UsageError("basins and critical_points are only defined for the lmg model");
    }
    if (base.phi_grid < 1) throw UsageError("--phi-grid must be >= 1");
    const Sweep s = parse_sweep(base);
    Options resolved = base;
    if (!resolved.gamma_a) resolved.gamma_a = resolved_gamma_a(base);

    Output sink(base.out, out);
    Table t;
    t.metadata = base_metadata(resolved, "sweep");
    t.metadata.emplace_back("sweep", s.spec());
    t.metadata.emplace_back("observables", join(base.observables));
    t.metadata.emplace_back("solver", base.solver);
    if (wants(base, "c_phi_grid")) t.metadata.emplace_back("phi_grid", "k*pi/" + std::to_string(base.phi_grid));
    if (wants(base, "basins")) {
        t.metadata.emplace_back("grid", std::to_string(base.grid));
        t.metadata.emplace_back("t_final", format_number(base.t_final));
    }
    t.columns = sweep_columns(base, s);

    const std::size_t per_value = base.n.size();
    const std::size_t total = static_cast<std::size_t>(s.steps) * per_value;
    t.rows.resize(total);
    std::vector<std::string> failures(total);
    parallel_for(total, base.workers, [&](std::size_t idx) {
        const int k = static_cast<int>(idx / per_value);
        const int n = base.n[idx % per_value];
        Options o = resolved;
        const double value = s.value(k);
        apply_value(o, s.param, value);
        try {
            auto row = sweep_row(o, s, value, n);
            row.resize(t.columns.size(), kNaN);
            t.rows[idx] = std::move(row);
        } catch (const std::exception& e) {
            std::vector<Cell> row{o.model, value, static_cast<double>(n), error_code(e)};
            row.resize(t.columns.size(), kNaN);
            t.rows[idx] = std::move(row);
            failures[idx] = e.what();
        }
    });

    int failed = 0;
    for (std::size_t i = 0; i < total; ++i) {
        if (failures[i].empty()) continue;
        ++failed;
        err << "row " << i << ": " << failures[i] << "\n";
    }
    sink.commit(base.format == "json" ? render_json(t) : render_csv(t));
    return failed ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------
// critical

int cmd_critical(const Options& o, std::ostream& out) {
    const auto d = sc::critical_points(o.h, o.lambda);
    json doc;
    doc["h"] = o.h;
    doc["lambda"] = o.lambda;
    doc["order"] = sc::to_string(d.order);
    if (d.order != sc::TransitionOrder::none) {
        doc["gamma_b_crit"] = d.gamma_b_crit;
        doc["gamma_b_dd"] = d.gamma_b_dd ? json(*d.gamma_b_dd) : json(nullptr);
        doc["upper_crit"] = d.upper_crit;
        doc["bistable_window"] =
            d.bistable_window ? json::array({d.bistable_window->first, d.bistable_window->second}) : json(nullptr);
        doc["jump_lower"] = d.jump_lower;
        doc["jump_upper"] = d.jump_upper;
        doc["dd_above_crit"] = d.dd_above_crit;
    }
    Output sink(o.out, out);
    sink.commit(doc.dump() + "\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// trajectories and basins

// Uniform on the sphere from raw generator output, identical on every platform.
sc::BlochState random_direction(std::mt19937_64& rng) {
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const double z = 2.0 * unit() - 1.0;
    const double phi = 2.0 * pi * unit();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

sc::Rhs field_for(const Options& o) {
    if (is_lmg(o)) return sc::lmg_field(lmg_params(o, 1));
    return sc::crf_field(crf_params(o, 1));
}

void push_state(std::vector<Cell>& row, const sc::BlochState& s) {
    const auto uv = sc::project(s);
    row.insert(row.end(), {s.x, s.y, s.z, uv.u, uv.v});
}

int cmd_trajectories(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.count < 1) throw UsageError("--count must be >= 1");
    if (!(o.t_final >= 0.0) || !(o.dt_max > 0.0)) throw UsageError("--t-final must be >= 0 and --dt-max > 0");
    Output sink(o.out, out);
    std::mt19937_64 rng(o.seed);
    std::vector<sc::BlochState> starts;
    for (int i = 0; i < o.count; ++i) starts.push_back(random_direction(rng));

    const sc::Rhs field = field_for(o);
    std::vector<sc::Trajectory> paths(starts.size());
    std::vector<std::string> failures(starts.size());
    parallel_for(starts.size(), o.workers, [&](std::size_t i) {
        sc::IntegrateOptions io;
        io.record = !o.terminal_only;
        try {
            paths[i] = sc::integrate(field, starts[i], o.t_final, o.dt_max, io);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    Table t;
    t.metadata = base_metadata(o, "trajectories");
    t.metadata.emplace_back("count", std::to_string(o.count));
    t.metadata.emplace_back("t_final", format_number(o.t_final));
    t.metadata.emplace_back("dt_max", format_number(o.dt_max));
    t.metadata.emplace_back("terminal_only", o.terminal_only ? "true" : "false");
    t.columns = {"trajectory", "t", "X", "Y", "Z", "U", "V"};
    int failed = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (!failures[i].empty()) {
            ++failed;
            err << "trajectory " << i << ": " << failures[i] << "\n";
            std::vector<Cell> row{static_cast<double>(i)};
            row.resize(t.columns.size(), kNaN);
            t.rows.push_back(row);
            continue;
        }
        const auto& path = paths[i];
        const std::size_t first = o.terminal_only ? path.size() - 1 : 0;
        for (std::size_t k = first; k < path.size(); ++k) {
            std::vector<Cell> row{static_cast<double>(i), path[k].t};
            push_state(row, path[k].s);
            t.rows.push_back(std::move(row));
        }
    }
    sink.commit(o.format == "json" ? render_json(t) : render_csv(t));
    return failed ? kExitPartial : kExitOk;
}

int cmd_basins(const Options& o, std::ostream& out, std::ostream& err) {
    if (!is_lmg(o)) throw UsageError("basins is only defined for the lmg model");
    if (o.grid < 4) throw UsageError("--grid must be >= 4");
    Output sink(o.out, out);
    sc::BasinOptions bo;
    bo.t_final = o.t_final;
    bo.dt_max = o.dt_max;
    bo.workers = o.workers;
    const auto map = sc::basin_map(lmg_params(o, 1), o.grid, bo);

    Table t;
    t.metadata = base_metadata(o, "basins");
    t.metadata.emplace_back("grid", std::to_string(o.grid));
    t.metadata.emplace_back("t_final", format_number(o.t_final));
    t.metadata.emplace_back("dt_max", format_number(o.dt_max));
    std::string attractors;
    for (const auto& a : map.attractors) attractors += std::string(attractors.empty() ? "" : ",") + sc::to_string(a.branch);
    t.metadata.emplace_back("attractors", attractors);
    t.columns = {"sample", "X0", "Y0", "Z0", "U0", "V0", "X", "Y", "Z", "U", "V", "attractor"};
    std::size_t unclassified = 0;
    for (std::size_t i = 0; i < map.samples.size(); ++i) {
        const auto& s = map.samples[i];
        std::vector<Cell> row{static_cast<double>(i)};
        push_state(row, s.initial);
        push_state(row, s.terminal);
        row.emplace_back(std::string(s.attractor ? sc::to_string(*s.attractor) : "unclassified"));
        if (!s.attractor) ++unclassified;
        t.rows.push_back(std::move(row));
    }
    if (unclassified) err << unclassified << " samples did not converge by t = " << o.t_final << "\n";
    sink.commit(o.format == "json" ? render_json(t) : render_csv(t));
    return kExitOk;
}

// ---------------------------------------------------------------------------
// qfunction

int cmd_qfunction(const Options& o, std::ostream& out) {
    if (o.n.size() != 1) throw UsageError("qfunction takes a single --n");
    const int n = o.n.front();
    if (n < 1) throw UsageError("--n must be >= 1");
    const int theta_res = o.theta_res > 0 ? o.theta_res : default_theta_res(n);
    const int phi_res = o.phi_res > 0 ? o.phi_res : default_phi_res(n);
    if (theta_res < 8 || phi_res < 8) throw UsageError("--theta-res and --phi-res must be >= 8");
    Output sink(o.out, out);

    const auto ops = build_operators(n);
    const auto ss = solve(o, n, ops);
    const auto q = q_function(ss.rho, theta_res, phi_res);
    const auto peaks = peak_census(q);

    Table t;
    t.metadata = base_metadata(o, "qfunction");
    t.metadata.emplace_back("solver", to_string(ss.method));
    t.metadata.emplace_back("theta_res", std::to_string(theta_res));
    t.metadata.emplace_back("phi_res", std::to_string(phi_res));
    t.metadata.emplace_back("theta_nodes", "gauss-legendre in cos(theta)");
    t.metadata.emplace_back("normalization", format_number(q.normalization()));
    t.metadata.emplace_back("peaks", std::to_string(peaks.size()));
    t.columns = {"theta", "phi", "value"};
    for (int i = 0; i < q.theta_res(); ++i)
        for (int k = 0; k < q.phi_res(); ++k) t.rows.push_back({q.theta[i], q.phi[k], q.values(i, k)});
    sink.commit(o.format == "json" ? render_json(t) : render_csv(t));
    return kExitOk;
}

// ---------------------------------------------------------------------------

void add_common(CLI::App& app, Options& o) {
    app.add_option("--model", o.model, "crf or lmg")->check(CLI::IsMember({"crf", "lmg"}))->capture_default_str();
    app.add_option("--omega", o.omega, "CRF drive strength")->capture_default_str();
    app.add_option("--gamma", o.gamma, "CRF collective decay rate")->capture_default_str();
    app.add_option("--h", o.h, "LMG field")->capture_default_str();
    app.add_option("--lambda", o.lambda, "LMG interaction")->capture_default_str();
    app.add_option("--gamma-a", o.gamma_a,
                   "LMG dephasing rate (default 0.01 when lambda > 2h, else 0)");
    app.add_option("--gamma-b", o.gamma_b, "LMG collective pumping rate")->capture_default_str();
    app.add_option("--n", o.n, "atom counts, comma separated")->delimiter(',')->capture_default_str();
    app.add_option("--sweep", o.sweep, "param:min:max:steps");
    app.add_option("--observables", o.observables, "comma separated list")
        ->delimiter(',')
        ->check(CLI::IsMember(kObservables))
        ->capture_default_str();
    app.add_option("--out", o.out, "output path (default stdout)");
    app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--seed", o.seed, "seed for sampled initial states")->capture_default_str();
    app.add_option("--workers", o.workers, "worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--solver", o.solver, "auto, exact (crf) or nullspace")
        ->check(CLI::IsMember({"auto", "exact", "nullspace"}))
        ->capture_default_str();
    app.add_option("--phi-grid", o.phi_grid, "C_phi grid points over [0, pi)")->capture_default_str();
    app.add_option("--grid", o.grid, "basin sampling resolution")->capture_default_str();
    app.add_option("--count", o.count, "number of random initial states")->capture_default_str();
    app.add_option("--t-final", o.t_final, "integration time")->capture_default_str();
    app.add_option("--dt-max", o.dt_max, "largest integration step")->capture_default_str();
    app.add_flag("--terminal-only", o.terminal_only, "emit only the final point of each trajectory");
    app.add_option("--theta-res", o.theta_res, "Q grid polar nodes (0 = automatic)")->capture_default_str();
    app.add_option("--phi-res", o.phi_res, "Q grid azimuth points (0 = automatic)")->capture_default_str();
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Collective spin steady states, entanglement and semiclassics"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "TOML/INI file of option values; flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    add_common(app, o);
    auto* sweep = app.add_subcommand("sweep", "steady-state observables over a parameter range");
    auto* critical = app.add_subcommand("critical", "closed-form LMG transition data as JSON");
    auto* traj = app.add_subcommand("trajectories", "semiclassical trajectories from random initial states");
    auto* basins = app.add_subcommand("basins", "basins of attraction on an equal-area grid");
    auto* qfunc = app.add_subcommand("qfunction", "spin Q-function of the steady state");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(o, out, err);
        if (critical->parsed()) return cmd_critical(o, out);
        if (traj->parsed()) return cmd_trajectories(o, out, err);
        if (basins->parsed()) return cmd_basins(o, out, err);
        if (qfunc->parsed()) return cmd_qfunction(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitPartial;
    }
    return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"collspin"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace collspin::cli
