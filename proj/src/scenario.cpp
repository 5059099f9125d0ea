#include "metacrystal/scenario.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "metacrystal/ensemble.hpp"
#include "metacrystal/rng.hpp"

namespace metacrystal::scenario {

namespace fs = std::filesystem;

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

// ---------------------------------------------------------------------------
// validation helpers

struct Obj {
    const json& j;
    std::string path;

    Obj(const json& doc, std::string p) : j(doc), path(std::move(p)) {
        if (!j.is_object()) throw SchemaError(path, "expected an object");
    }

    void allow_only(const std::set<std::string>& keys) const {
        for (const auto& [k, v] : j.items()) {
            if (!keys.count(k)) throw SchemaError(path + "/" + k, "unknown key");
        }
    }
    bool has(const std::string& k) const { return j.contains(k); }

    const json& require(const std::string& k) const {
        if (!j.contains(k)) throw SchemaError(path + "/" + k, "missing required key");
        return j.at(k);
    }

    double num(const std::string& k, std::optional<double> dflt = {},
               std::optional<double> lo = {}, std::optional<double> hi = {},
               bool lo_strict = false) const {
        if (!j.contains(k)) {
            if (dflt) return *dflt;
            throw SchemaError(path + "/" + k, "missing required number");
        }
        const json& v = j.at(k);
        if (!v.is_number()) throw SchemaError(path + "/" + k, "expected a number");
        const double x = v.get<double>();
        if (lo && (lo_strict ? !(x > *lo) : !(x >= *lo)))
            throw SchemaError(path + "/" + k, "value out of range (too small)");
        if (hi && !(x <= *hi))
            throw SchemaError(path + "/" + k, "value out of range (too large)");
        return x;
    }

    long integer(const std::string& k, std::optional<long> dflt = {},
                 std::optional<long> lo = {}, std::optional<long> hi = {}) const {
        if (!j.contains(k)) {
            if (dflt) return *dflt;
            throw SchemaError(path + "/" + k, "missing required integer");
        }
        const json& v = j.at(k);
        if (!v.is_number_integer())
            throw SchemaError(path + "/" + k, "expected an integer");
        const long x = v.get<long>();
        if (lo && x < *lo) throw SchemaError(path + "/" + k, "integer too small");
        if (hi && x > *hi) throw SchemaError(path + "/" + k, "integer too large");
        return x;
    }

    std::uint64_t u64(const std::string& k, std::uint64_t dflt) const {
        if (!j.contains(k)) return dflt;
        const json& v = j.at(k);
        if (!v.is_number_unsigned() && !v.is_number_integer())
            throw SchemaError(path + "/" + k, "expected an unsigned integer");
        if (v.is_number_integer() && v.get<long long>() < 0)
            throw SchemaError(path + "/" + k, "seed must be non-negative");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& k, bool dflt) const {
        if (!j.contains(k)) return dflt;
        const json& v = j.at(k);
        if (!v.is_boolean()) throw SchemaError(path + "/" + k, "expected a boolean");
        return v.get<bool>();
    }

    std::string str(const std::string& k,
                    const std::set<std::string>& allowed,
                    std::optional<std::string> dflt = {}) const {
        if (!j.contains(k)) {
            if (dflt) return *dflt;
            throw SchemaError(path + "/" + k, "missing required string");
        }
        const json& v = j.at(k);
        if (!v.is_string()) throw SchemaError(path + "/" + k, "expected a string");
        const auto s = v.get<std::string>();
        if (!allowed.empty() && !allowed.count(s))
            throw SchemaError(path + "/" + k, "unexpected value '" + s + "'");
        return s;
    }
};

// ---------------------------------------------------------------------------
// section parsers; each returns the typed value and fills the echoed json

band::DispersionSpec parse_band(const json& doc, const std::string& path,
                                json& echo) {
    Obj o(doc, path);
    o.allow_only({"kind", "J", "a", "coefficients"});
    const auto kind = o.str("kind", {"sinusoidal", "sawtooth", "custom"});
    const double a = o.num("a", 1.0, 0.0, {}, /*lo_strict=*/true);
    echo["kind"] = kind;
    echo["a"] = a;
    if (kind == "custom") {
        const json& cj = o.require("coefficients");
        if (!cj.is_array() || cj.empty())
            throw SchemaError(path + "/coefficients", "expected a non-empty array");
        std::vector<std::pair<int, band::cplx>> coeffs;
        for (std::size_t i = 0; i < cj.size(); ++i) {
            const json& e = cj[i];
            const std::string ep = path + "/coefficients/" + std::to_string(i);
            if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
                !e[1].is_number() || !e[2].is_number())
                throw SchemaError(ep, "expected [n, re, im]");
            coeffs.emplace_back(e[0].get<int>(),
                                band::cplx{e[1].get<double>(), e[2].get<double>()});
        }
        echo["coefficients"] = cj;
        return band::DispersionSpec::custom(std::move(coeffs), a);
    }
    const double J = o.num("J", 1.0, 0.0);
    echo["J"] = J;
    return kind == "sawtooth" ? band::DispersionSpec::sawtooth(J, a)
                              : band::DispersionSpec::sinusoidal(J, a);
}

PotentialCfg parse_potential(const json& doc, const std::string& path,
                             json& echo) {
    PotentialCfg p;
    Obj o(doc, path);
    p.kind = o.str("kind",
                   {"none", "site_delta", "gaussian_well", "uniform_disorder"});
    echo["kind"] = p.kind;
    if (p.kind == "none") {
        o.allow_only({"kind"});
    } else if (p.kind == "site_delta") {
        o.allow_only({"kind", "site", "U0"});
        p.site = static_cast<int>(o.integer("site", 0L));
        p.U0 = o.num("U0");
        echo["site"] = p.site;
        echo["U0"] = p.U0;
    } else if (p.kind == "gaussian_well") {
        o.allow_only({"kind", "U0", "d", "s"});
        p.U0 = o.num("U0");
        p.d = o.num("d");
        p.s = o.num("s", {}, 0.0, {}, /*lo_strict=*/true);
        echo["U0"] = p.U0;
        echo["d"] = p.d;
        echo["s"] = p.s;
    } else {
        o.allow_only({"kind", "half_width", "seed"});
        p.half_width = o.num("half_width", {}, 0.0, {}, /*lo_strict=*/true);
        p.seed = o.u64("seed", 0);
        echo["half_width"] = p.half_width;
        echo["seed"] = p.seed;
    }
    return p;
}

LatticeRunCfg parse_lattice_run(const json& doc, const std::string& path,
                                json& echo) {
    Obj top(doc, path);
    top.allow_only({"kind", "band", "lattice", "packet", "potential", "run",
                    "report"});
    LatticeRunCfg cfg;
    cfg.spec = parse_band(top.require("band"), path + "/band", echo["band"]);

    {
        const json section =
            top.has("lattice") ? top.require("lattice") : json::object();
        Obj o(section, path + "/lattice");
        o.allow_only({"n_sites", "origin_label"});
        cfg.n_sites = static_cast<int>(o.integer("n_sites", 256L, 8L));
        if (cfg.n_sites % 2 != 0)
            throw SchemaError(path + "/lattice/n_sites", "must be even");
        cfg.origin_label =
            static_cast<int>(o.integer("origin_label", -(cfg.n_sites / 2L)));
        echo["lattice"]["n_sites"] = cfg.n_sites;
        echo["lattice"]["origin_label"] = cfg.origin_label;
    }
    {
        const json section =
            top.has("packet") ? top.require("packet") : json::object();
        Obj o(section, path + "/packet");
        o.allow_only({"center", "sigma_sq", "k0a"});
        cfg.packet.center = o.num("center", -20.0);
        cfg.packet.sigma_sq = o.num("sigma_sq", 16.0, 1.0);
        cfg.packet.k0a = o.num("k0a", std::numbers::pi / 2.0, -std::numbers::pi,
                               std::numbers::pi);
        echo["packet"]["center"] = cfg.packet.center;
        echo["packet"]["sigma_sq"] = cfg.packet.sigma_sq;
        echo["packet"]["k0a"] = cfg.packet.k0a;
    }
    cfg.potential = parse_potential(
        top.has("potential") ? top.require("potential") : json{{"kind", "none"}},
        path + "/potential", echo["potential"]);
    {
        Obj o(top.require("run"), path + "/run");
        o.allow_only({"duration", "dt", "sample_every", "snapshots"});
        cfg.duration = o.num("duration", {}, 0.0);
        cfg.dt = o.num("dt", 0.01, 0.0, {}, /*lo_strict=*/true);
        cfg.sample_every = static_cast<int>(o.integer("sample_every", 100L, 1L));
        cfg.snapshots = o.boolean("snapshots", false);
        echo["run"]["duration"] = cfg.duration;
        echo["run"]["dt"] = cfg.dt;
        echo["run"]["sample_every"] = cfg.sample_every;
        echo["run"]["snapshots"] = cfg.snapshots;
    }
    if (top.has("report")) {
        Obj o(top.require("report"), path + "/report");
        o.allow_only({"barrier_site", "t_eval"});
        cfg.barrier_site = static_cast<int>(o.integer("barrier_site", 0L));
        cfg.t_eval = o.num("t_eval", cfg.duration);
        echo["report"]["barrier_site"] = *cfg.barrier_site;
        echo["report"]["t_eval"] = cfg.t_eval;
    }
    return cfg;
}

CavityRunCfg parse_cavity_run(const json& doc, const std::string& path,
                              json& echo) {
    Obj top(doc, path);
    top.allow_only({"kind", "cavity", "grating", "mask", "injection", "run"});
    CavityRunCfg cfg;
    {
        const json section =
            top.has("cavity") ? top.require("cavity") : json::object();
        Obj o(section, path + "/cavity");
        o.allow_only({"lambda", "focal", "grating_period", "T", "n_x",
                      "window_periods", "exact_phase"});
        cfg.cavity.lambda = o.num("lambda", 633e-9, 0.0, {}, true);
        cfg.cavity.focal = o.num("focal", 0.02, 0.0, {}, true);
        cfg.cavity.A = o.num("grating_period", 30e-6, 0.0, {}, true);
        cfg.cavity.T = o.num("T", 0.02, 0.0, 1.0);
        if (cfg.cavity.T >= 1.0)
            throw SchemaError(path + "/cavity/T", "must be < 1");
        cfg.cavity.n_x = static_cast<int>(o.integer("n_x", 8192L, 1024L));
        const double periods = o.num("window_periods", 64.0, 16.0);
        cfg.cavity.L_x = periods * cfg.cavity.period();
        cfg.cavity.exact_phase = o.boolean("exact_phase", true);
        echo["cavity"]["lambda"] = cfg.cavity.lambda;
        echo["cavity"]["focal"] = cfg.cavity.focal;
        echo["cavity"]["grating_period"] = cfg.cavity.A;
        echo["cavity"]["T"] = cfg.cavity.T;
        echo["cavity"]["n_x"] = cfg.cavity.n_x;
        echo["cavity"]["window_periods"] = periods;
        echo["cavity"]["exact_phase"] = cfg.cavity.exact_phase;
    }
    {
        const json section =
            top.has("grating") ? top.require("grating") : json::object();
        Obj o(section, path + "/grating");
        o.allow_only({"kind", "J", "samples"});
        const auto kind =
            o.str("kind", {"sinusoidal", "sawtooth", "custom"}, "sawtooth");
        echo["grating"]["kind"] = kind;
        if (kind == "custom") {
            const json& sj = o.require("samples");
            if (!sj.is_array() || sj.size() < 2)
                throw SchemaError(path + "/grating/samples",
                                  "expected an array of >= 2 numbers");
            cfg.cavity.grating.kind = cavity::GratingKind::Custom;
            for (const auto& v : sj) {
                if (!v.is_number())
                    throw SchemaError(path + "/grating/samples", "expected numbers");
                cfg.cavity.grating.samples.push_back(v.get<double>());
            }
            echo["grating"]["samples"] = sj;
        } else {
            cfg.cavity.grating.kind = kind == "sawtooth"
                                          ? cavity::GratingKind::Sawtooth
                                          : cavity::GratingKind::Sinusoidal;
            cfg.cavity.grating.J = o.num("J", 0.5, 0.0);
            echo["grating"]["J"] = cfg.cavity.grating.J;
        }
    }
    {
        const json section =
            top.has("mask") ? top.require("mask") : json{{"kind", "none"}};
        Obj o(section, path + "/mask");
        const auto kind =
            o.str("kind", {"none", "gaussian_well", "piecewise_disorder"}, "none");
        echo["mask"]["kind"] = kind;
        if (kind == "none") {
            o.allow_only({"kind"});
            cfg.cavity.mask.kind = cavity::MaskKind::None;
        } else if (kind == "gaussian_well") {
            o.allow_only({"kind", "U0", "d", "s"});
            cfg.cavity.mask.kind = cavity::MaskKind::GaussianWell;
            cfg.cavity.mask.U0 = o.num("U0");
            cfg.cavity.mask.d = o.num("d");
            cfg.cavity.mask.s = o.num("s", {}, 0.0, {}, true);
            echo["mask"]["U0"] = cfg.cavity.mask.U0;
            echo["mask"]["d"] = cfg.cavity.mask.d;
            echo["mask"]["s"] = cfg.cavity.mask.s;
        } else {
            o.allow_only({"kind", "half_width", "seed"});
            cfg.cavity.mask.kind = cavity::MaskKind::PiecewiseDisorder;
            cfg.cavity.mask.half_width = o.num("half_width", {}, 0.0, {}, true);
            cfg.cavity.mask.seed = o.u64("seed", 0);
            echo["mask"]["half_width"] = cfg.cavity.mask.half_width;
            echo["mask"]["seed"] = cfg.cavity.mask.seed;
        }
    }
    {
        const json section =
            top.has("injection") ? top.require("injection") : json::object();
        Obj o(section, path + "/injection");
        o.allow_only({"waist", "k0a", "t0", "tau", "amplitude"});
        cfg.injection.w = o.num("waist", 800e-6, 0.0, {}, true);
        cfg.injection.k0a = o.num("k0a", std::numbers::pi / 2.0);
        cfg.injection.t0 = o.num("t0", 20.0);
        cfg.injection.tau = o.num("tau", 10.0, 0.0, {}, true);
        cfg.injection.amplitude = o.num("amplitude", 1.0);
        echo["injection"]["waist"] = cfg.injection.w;
        echo["injection"]["k0a"] = cfg.injection.k0a;
        echo["injection"]["t0"] = cfg.injection.t0;
        echo["injection"]["tau"] = cfg.injection.tau;
        echo["injection"]["amplitude"] = cfg.injection.amplitude;
    }
    {
        Obj o(top.require("run"), path + "/run");
        o.allow_only({"n_trips", "sample_every", "snapshots"});
        cfg.n_trips = static_cast<int>(o.integer("n_trips", {}, 1L));
        cfg.sample_every = static_cast<int>(o.integer("sample_every", 1L, 1L));
        cfg.snapshots = o.boolean("snapshots", false);
        echo["run"]["n_trips"] = cfg.n_trips;
        echo["run"]["sample_every"] = cfg.sample_every;
        echo["run"]["snapshots"] = cfg.snapshots;
    }
    cfg.cavity.validate();
    return cfg;
}

EnsembleRunCfg parse_ensemble_run(const json& doc, const std::string& path,
                                  json& echo) {
    Obj top(doc, path);
    top.allow_only(
        {"kind", "scenario", "n_realizations", "base_seed", "workers", "windows"});
    EnsembleRunCfg cfg;
    const json& sc = top.require("scenario");
    {
        Obj so(sc, path + "/scenario");
        if (so.str("kind", {"lattice_run"}) != "lattice_run")
            throw SchemaError(path + "/scenario/kind", "must be lattice_run");
    }
    echo["scenario"]["kind"] = "lattice_run";
    cfg.scenario = parse_lattice_run(sc, path + "/scenario", echo["scenario"]);
    if (cfg.scenario.potential.kind != "uniform_disorder")
        throw SchemaError(path + "/scenario/potential/kind",
                          "ensemble scenarios need uniform_disorder");
    cfg.n_realizations =
        static_cast<int>(top.integer("n_realizations", 20L, 1L));
    cfg.base_seed = top.u64("base_seed", 0);
    cfg.workers = static_cast<int>(top.integer("workers", 0L, 0L));
    echo["n_realizations"] = cfg.n_realizations;
    echo["base_seed"] = cfg.base_seed;
    echo["workers"] = cfg.workers;

    auto window = [&](const json& wj, const std::string& wpath, double dflt0,
                      double dflt1, double& t0, double& t1) {
        if (wj.is_null()) {
            t0 = dflt0;
            t1 = dflt1;
            return;
        }
        if (!wj.is_array() || wj.size() != 2 || !wj[0].is_number() ||
            !wj[1].is_number())
            throw SchemaError(wpath, "expected [t0, t1]");
        t0 = wj[0].get<double>();
        t1 = wj[1].get<double>();
        if (!(t1 > t0)) throw SchemaError(wpath, "t1 must exceed t0");
    };
    json wj = top.has("windows") ? top.require("windows") : json::object();
    Obj wo(wj, path + "/windows");
    wo.allow_only({"slope", "early", "late"});
    window(wj.value("slope", json()), path + "/windows/slope", 0.0,
           cfg.scenario.duration, cfg.slope_t0, cfg.slope_t1);
    window(wj.value("early", json()), path + "/windows/early", 0.0, 10.0,
           cfg.early_t0, cfg.early_t1);
    window(wj.value("late", json()), path + "/windows/late", 20.0, 40.0,
           cfg.late_t0, cfg.late_t1);
    echo["windows"]["slope"] = {cfg.slope_t0, cfg.slope_t1};
    echo["windows"]["early"] = {cfg.early_t0, cfg.early_t1};
    echo["windows"]["late"] = {cfg.late_t0, cfg.late_t1};
    return cfg;
}

BandReportCfg parse_band_report(const json& doc, const std::string& path,
                                json& echo) {
    Obj top(doc, path);
    top.allow_only({"kind", "band", "M", "n_samples"});
    BandReportCfg cfg;
    cfg.spec = parse_band(top.require("band"), path + "/band", echo["band"]);
    cfg.M = static_cast<int>(top.integer("M", 64L, 1L));
    cfg.n_samples = static_cast<int>(top.integer("n_samples", 256L, 16L));
    echo["M"] = cfg.M;
    echo["n_samples"] = cfg.n_samples;
    return cfg;
}

// ---------------------------------------------------------------------------
// output writers

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + p.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + p.string());
}

std::string csv_header(const std::string& hash, const std::string& columns) {
    return "# config_hash=" + hash + "\n" + columns + "\n";
}

void write_summary(const fs::path& dir, json summary,
                   const ScenarioConfig& cfg) {
    summary["config_hash"] = cfg.config_hash;
    summary["tool_version"] = kToolVersion;
    summary["config"] = cfg.effective;
    write_text(dir / "summary.json", summary.dump(2) + "\n");
}

void write_snapshots(const fs::path& dir,
                     const std::vector<lattice::LatticeState>& snaps,
                     double dt_between, const std::string& hash) {
    std::ofstream bin(dir / "snapshots.bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open snapshots.bin");
    for (const auto& st : snaps) {
        for (const auto& v : st.amplitudes) {
            const double re = v.real(), im = v.imag();
            bin.write(reinterpret_cast<const char*>(&re), sizeof(double));
            bin.write(reinterpret_cast<const char*>(&im), sizeof(double));
        }
    }
    json side;
    side["config_hash"] = hash;
    side["n_sites"] = snaps.empty() ? 0 : snaps.front().size();
    side["frames"] = snaps.size();
    side["dt_between_frames"] = dt_between;
    side["layout"] = "little-endian float64 interleaved (re, im), frame-major";
    write_text(dir / "snapshots.json", side.dump(2) + "\n");
}

void run_band_report(const BandReportCfg& cfg, const ScenarioConfig& sc,
                     const fs::path& dir) {
    const auto hops = band::hoppings(cfg.spec, cfg.M);
    std::string csv = csv_header(sc.config_hash, "k,E,E_reconstructed");
    const double a = cfg.spec.a;
    for (int i = 0; i < cfg.n_samples; ++i) {
        const double k =
            -std::numbers::pi / a +
            (i + 0.5) * (2.0 * std::numbers::pi / a) / cfg.n_samples;
        csv += format_double(k) + "," + format_double(band::evaluate(cfg.spec, k)) +
               "," + format_double(band::reconstruct(hops, k)) + "\n";
    }
    write_text(dir / "trace.csv", csv);

    std::string hcsv = csv_header(sc.config_hash, "n,re,im");
    for (const auto& [n, J_n] : hops.entries)
        hcsv += std::to_string(n) + "," + format_double(J_n.real()) + "," +
                format_double(J_n.imag()) + "\n";
    write_text(dir / "hoppings.csv", hcsv);

    const auto cert = band::one_way_certificate(cfg.spec, cfg.n_samples);
    json summary;
    summary["observables"]["time_reversal_symmetric"] =
        band::time_reversal_symmetric(cfg.spec, cfg.n_samples, 1e-12);
    summary["observables"]["one_way"] = cert.one_way;
    summary["observables"]["v_min"] = cert.v_min;
    summary["observables"]["v_max"] = cert.v_max;
    summary["observables"]["hermitian"] = hops.hermitian();
    write_summary(dir, summary, sc);
}

struct LatticeRunResult {
    lattice::Trajectory traj;
    std::uint64_t seed_used = 0;
};

LatticeRunResult execute_lattice(const LatticeRunCfg& cfg,
                                 std::optional<std::uint64_t> seed_override) {
    LatticeRunCfg eff = cfg;
    if (seed_override && eff.potential.kind == "uniform_disorder")
        eff.potential.seed = *seed_override;
    const auto pot = eff.potential.build(eff.n_sites, eff.origin_label);
    const auto f0 = lattice::gaussian_packet(eff.n_sites, eff.packet.center,
                                             eff.packet.sigma_sq, eff.packet.k0a,
                                             eff.origin_label);
    lattice::SplitStepOptions opt;
    opt.dt = eff.dt;
    opt.sample_every = eff.sample_every;
    opt.keep_snapshots = true;  // heatmap and partition reports need them
    LatticeRunResult res;
    res.traj = lattice::propagate_splitstep(f0, eff.spec, pot, eff.duration, opt);
    res.seed_used = eff.potential.seed;
    return res;
}

void run_lattice(const LatticeRunCfg& cfg, const ScenarioConfig& sc,
                 const fs::path& dir, const Overrides& ov) {
    const auto res = execute_lattice(cfg, ov.seed);
    const auto& traj = res.traj;

    std::string csv = csv_header(sc.config_hash, "t,norm,com");
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        csv += format_double(traj.times[i]) + "," + format_double(traj.norms[i]) +
               "," + format_double(traj.centers_of_mass[i]) + "\n";
    write_text(dir / "trace.csv", csv);

    std::string hm = "# config_hash=" + sc.config_hash +
                     "\n# rows: sample times; columns: sites " +
                     std::to_string(cfg.origin_label) + ".." +
                     std::to_string(cfg.origin_label + cfg.n_sites - 1) + "\n";
    for (const auto& st : traj.snapshots) {
        for (int j = 0; j < st.size(); ++j) {
            if (j) hm += ",";
            hm += format_double(std::norm(st.amplitudes[j]));
        }
        hm += "\n";
    }
    write_text(dir / "heatmap.csv", hm);

    json summary;
    summary["observables"]["final_norm"] = traj.norms.back();
    summary["observables"]["final_com"] = traj.centers_of_mass.back();
    summary["observables"]["final_stddev"] = lattice::packet_stddev(traj.final_state);
    if (traj.times.size() >= 2)
        summary["observables"]["com_slope"] =
            lattice::com_slope(traj, traj.times.front(), traj.times.back());
    if (cfg.barrier_site) {
        const auto part =
            lattice::transmission_reflection(traj, *cfg.barrier_site, cfg.t_eval);
        summary["observables"]["transmission"] = part.transmitted;
        summary["observables"]["reflection"] = part.reflected;
        summary["observables"]["trapped"] = part.trapped;
    }
    if (cfg.potential.kind == "uniform_disorder")
        summary["seeds"]["disorder"] = res.seed_used;
    if (cfg.snapshots) {
        const double dt_between =
            traj.times.size() >= 2 ? traj.times[1] - traj.times[0] : 0.0;
        write_snapshots(dir, traj.snapshots, dt_between, sc.config_hash);
    }
    write_summary(dir, summary, sc);
}

void run_cavity(const CavityRunCfg& cfg, const ScenarioConfig& sc,
                const fs::path& dir, const Overrides& ov) {
    CavityRunCfg eff = cfg;
    if (ov.seed && eff.cavity.mask.kind == cavity::MaskKind::PiecewiseDisorder)
        eff.cavity.mask.seed = *ov.seed;
    cavity::Propagator prop(eff.cavity);

    auto field = cavity::zero_field(eff.cavity);
    std::vector<double> powers{cavity::intracavity_power(field)};
    std::vector<double> centroids{0.0};
    std::vector<std::vector<double>> frames;
    const int hm_stride = std::max(1, eff.cavity.n_x / 512);
    auto record_frame = [&](const cavity::CavityField& f) {
        std::vector<double> row;
        row.reserve(f.samples.size() / hm_stride);
        for (std::size_t j = 0; j < f.samples.size(); j += hm_stride)
            row.push_back(std::norm(f.samples[j]));
        frames.push_back(std::move(row));
    };
    record_frame(field);

    std::string csv = csv_header(sc.config_hash, "m,power,power_norm");
    std::vector<cavity::CavityField> snaps;
    for (int m = 1; m <= eff.n_trips; ++m) {
        field = prop.driven_round_trip(field, eff.injection);
        if (m % eff.sample_every == 0 || m == eff.n_trips) {
            powers.push_back(cavity::intracavity_power(field));
            centroids.push_back(powers.back() > 0.0 ? cavity::centroid(field)
                                                    : 0.0);
            record_frame(field);
            if (eff.snapshots) snaps.push_back(field);
        }
    }
    const double pmax =
        *std::max_element(powers.begin(), powers.end()) > 0.0
            ? *std::max_element(powers.begin(), powers.end())
            : 1.0;
    std::size_t row = 0;
    for (int m = 0; m <= eff.n_trips; ++m) {
        if (m != 0 && m % eff.sample_every != 0 && m != eff.n_trips) continue;
        csv += std::to_string(m) + "," + format_double(powers[row]) + "," +
               format_double(powers[row] / pmax) + "\n";
        ++row;
    }
    write_text(dir / "trace.csv", csv);

    std::string hm = "# config_hash=" + sc.config_hash +
                     "\n# rows: sampled round trips; columns: x at stride " +
                     std::to_string(hm_stride) + " of n_x=" +
                     std::to_string(eff.cavity.n_x) + "\n";
    for (const auto& fr : frames) {
        for (std::size_t j = 0; j < fr.size(); ++j) {
            if (j) hm += ",";
            hm += format_double(fr[j]);
        }
        hm += "\n";
    }
    write_text(dir / "heatmap.csv", hm);

    json summary;
    summary["observables"]["final_power"] = powers.back();
    summary["observables"]["max_power"] = pmax;
    summary["observables"]["final_centroid_m"] = centroids.back();
    summary["observables"]["final_centroid_periods"] =
        centroids.back() / eff.cavity.period();
    summary["observables"]["metacrystal_period"] = eff.cavity.period();
    if (eff.cavity.mask.kind == cavity::MaskKind::PiecewiseDisorder)
        summary["seeds"]["mask"] = eff.cavity.mask.seed;
    if (eff.snapshots) {
        std::ofstream bin(dir / "snapshots.bin", std::ios::binary);
        for (const auto& f : snaps)
            for (const auto& v : f.samples) {
                const double re = v.real(), im = v.imag();
                bin.write(reinterpret_cast<const char*>(&re), sizeof(double));
                bin.write(reinterpret_cast<const char*>(&im), sizeof(double));
            }
        json side;
        side["config_hash"] = sc.config_hash;
        side["n_x"] = eff.cavity.n_x;
        side["frames"] = snaps.size();
        side["dt_between_frames"] = eff.sample_every;
        side["layout"] = "little-endian float64 interleaved (re, im), frame-major";
        write_text(dir / "snapshots.json", side.dump(2) + "\n");
    }
    write_summary(dir, summary, sc);
}

void run_ensemble_scenario(const EnsembleRunCfg& cfg, const ScenarioConfig& sc,
                           const fs::path& dir, const Overrides& ov) {
    EnsembleRunCfg eff = cfg;
    if (ov.seed) eff.base_seed = *ov.seed;
    if (ov.workers) eff.workers = *ov.workers;
    int workers = eff.workers > 0
                      ? eff.workers
                      : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;

    auto realization = [&](std::uint64_t seed, int) {
        const auto res = execute_lattice(eff.scenario, seed);
        ensemble::ObservableMap obs;
        obs["com_slope"] =
            lattice::com_slope(res.traj, eff.slope_t0, eff.slope_t1);
        obs["com_slope_early"] =
            lattice::com_slope(res.traj, eff.early_t0, eff.early_t1);
        obs["com_slope_late"] =
            lattice::com_slope(res.traj, eff.late_t0, eff.late_t1);
        obs["final_norm"] = res.traj.norms.back();
        if (eff.scenario.barrier_site) {
            const auto part = lattice::transmission_reflection(
                res.traj, *eff.scenario.barrier_site, eff.scenario.t_eval);
            obs["transmission"] = part.transmitted;
            obs["reflection"] = part.reflected;
        }
        return obs;
    };
    const auto rep = ensemble::run_ensemble(eff.n_realizations, eff.base_seed,
                                            realization, workers);

    std::vector<std::string> names;
    for (const auto& [name, s] : rep.stats) names.push_back(name);
    std::string csv_cols = "index,seed";
    for (const auto& n : names) csv_cols += "," + n;
    std::string csv = csv_header(sc.config_hash, csv_cols);
    for (const auto& rec : rep.realizations) {
        csv += std::to_string(rec.index) + "," + std::to_string(rec.seed);
        for (const auto& n : names)
            csv += "," + format_double(rec.observables.at(n));
        csv += "\n";
    }
    write_text(dir / "realizations.csv", csv);

    json summary;
    summary["seeds"]["base_seed"] = eff.base_seed;
    summary["n_realizations"] = eff.n_realizations;
    for (const auto& [name, s] : rep.stats) {
        summary["observables"][name] = {{"mean", s.mean},
                                        {"stddev", s.stddev},
                                        {"min", s.min},
                                        {"max", s.max}};
    }
    write_summary(dir, summary, sc);
}

}  // namespace

lattice::PotentialProfile PotentialCfg::build(int N, int origin_label) const {
    if (kind == "site_delta")
        return lattice::PotentialProfile::site_delta(N, origin_label, site, U0);
    if (kind == "gaussian_well")
        return lattice::PotentialProfile::gaussian_well(N, origin_label, U0, d, s);
    if (kind == "uniform_disorder")
        return lattice::PotentialProfile::uniform_disorder(N, half_width, seed);
    return lattice::PotentialProfile::none(N);
}

ScenarioConfig parse_config_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("", "top-level must be an object");
    if (!doc.contains("kind")) throw SchemaError("/kind", "missing");
    if (!doc.at("kind").is_string()) throw SchemaError("/kind", "expected a string");
    ScenarioConfig cfg;
    cfg.kind = doc.at("kind").get<std::string>();
    cfg.effective["kind"] = cfg.kind;
    if (cfg.kind == "band_report")
        cfg.run = parse_band_report(doc, "", cfg.effective);
    else if (cfg.kind == "lattice_run")
        cfg.run = parse_lattice_run(doc, "", cfg.effective);
    else if (cfg.kind == "cavity_run")
        cfg.run = parse_cavity_run(doc, "", cfg.effective);
    else if (cfg.kind == "ensemble_run")
        cfg.run = parse_ensemble_run(doc, "", cfg.effective);
    else
        throw SchemaError("/kind", "unknown scenario kind '" + cfg.kind + "'");
    cfg.config_hash = fnv1a_hex(cfg.effective.dump());
    return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config_json(doc);
}

void run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                  const Overrides& ov) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    std::visit(
        [&](const auto& run) {
            using T = std::decay_t<decltype(run)>;
            if constexpr (std::is_same_v<T, BandReportCfg>)
                run_band_report(run, cfg, dir);
            else if constexpr (std::is_same_v<T, LatticeRunCfg>)
                run_lattice(run, cfg, dir, ov);
            else if constexpr (std::is_same_v<T, CavityRunCfg>)
                run_cavity(run, cfg, dir, ov);
            else
                run_ensemble_scenario(run, cfg, dir, ov);
        },
        cfg.run);
}

}  // namespace metacrystal::scenario
