// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrbnn/dse.hpp"

#include "mrbnn/csv.hpp"
#include "mrbnn/errors.hpp"
#include "mrbnn/random.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <set>
#include <thread>
#include <tuple>

namespace mrbnn {

void SweepSpec::validate() const {
    auto check = [](const std::vector<std::size_t>& v, const char* name) {
        if (v.empty()) throw ConfigError(std::string("sweep.") + name + " must not be empty");
        for (auto x : v)
            if (x == 0) throw ConfigError(std::string("sweep.") + name + " values must be at least 1");
    };
    check(n_a, "n_a");
    check(n_vdp, "n_vdp");
    check(n_wg, "n_wg");
    if (n_b == 0) throw ConfigError("sweep.n_b must be at least 1");
    if (!(tuning_fraction >= 0.0 && tuning_fraction <= 1.0)) throw ConfigError("sweep.tuning_fraction must lie in [0, 1]");
    if (workloads.empty()) throw ConfigError("sweep.workloads must not be empty");
    for (const auto& w : workloads)
        if (w.activation_bits < 1) throw ConfigError("workload activation_bits must be at least 1");
    if (threads == 0) throw ConfigError("sweep.threads must be at least 1");
}

bool dominates(const Objectives& a, const Objectives& b) {
    const bool no_worse = a.fps >= b.fps && a.power_mw <= b.power_mw && a.area_mm2 <= b.area_mm2;
    const bool better = a.fps > b.fps || a.power_mw < b.power_mw || a.area_mm2 < b.area_mm2;
    return no_worse && better;
}

std::vector<bool> pareto_front(std::span<const Objectives> points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const auto& a = points[i];
        const auto& b = points[j];
        return std::make_tuple(-a.fps, a.power_mw, a.area_mm2, i) < std::make_tuple(-b.fps, b.power_mw, b.area_mm2, j);
    });
    // Only points earlier in this order can dominate later ones.
    std::vector<bool> flags(points.size(), false);
    std::vector<std::size_t> front;
    for (std::size_t i : order) {
        const bool dominated =
            std::any_of(front.begin(), front.end(), [&](std::size_t f) { return dominates(points[f], points[i]); });
        if (!dominated) {
            front.push_back(i);
            flags[i] = true;
        }
    }
    return flags;
}

namespace {

// True when a should be preferred over b at equal score.
bool tie_break(const DsePoint& a, const DsePoint& b) {
    return std::make_tuple(a.power_mw, a.area_mm2, a.n_a, a.n_vdp, a.n_wg) <
           std::make_tuple(b.power_mw, b.area_mm2, b.n_a, b.n_vdp, b.n_wg);
}

template <class Score>
std::optional<std::size_t> argmax(const std::vector<DsePoint>& pts, Score score) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!best) {
            best = i;
            continue;
        }
        const double s = score(pts[i]), sb = score(pts[*best]);
        if (s > sb || (s == sb && tie_break(pts[i], pts[*best]))) best = i;
    }
    return best;
}

std::uint64_t config_key(std::size_t a, std::size_t v, std::size_t w) {
    return splitmix64(splitmix64(splitmix64(a) ^ v) ^ w);
}

} // namespace

void finalize(ParetoResult& r) {
    std::vector<Objectives> obj;
    obj.reserve(r.points.size());
    for (const auto& p : r.points) obj.push_back(p.objectives());
    const auto flags = pareto_front(obj);
    for (std::size_t i = 0; i < r.points.size(); ++i) r.points[i].pareto = flags[i];
    r.eo_pick = argmax(r.points, [](const DsePoint& p) { return p.fps_per_watt(); });
    r.po_pick = argmax(r.points, [](const DsePoint& p) { return p.fps; });
}

ParetoResult run_sweep(const SweepSpec& spec, const AcceleratorConfig& base, const Platform& platform,
                       const FpvStatistics& fpv, std::uint64_t seed) {
    spec.validate();
    platform.validate();
    const std::set<std::size_t> as(spec.n_a.begin(), spec.n_a.end());
    const std::set<std::size_t> vs(spec.n_vdp.begin(), spec.n_vdp.end());
    const std::set<std::size_t> ws(spec.n_wg.begin(), spec.n_wg.end());
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> grid;
    for (auto a : as)
        for (auto v : vs)
            for (auto w : ws) grid.emplace_back(a, v, w);

    struct Outcome {
        bool ok = false;
        DsePoint point;
        std::string reason;
    };
    std::vector<Outcome> outcomes(grid.size());

    auto evaluate = [&](std::size_t idx) {
        const auto [a, v, w] = grid[idx];
        Outcome& out = outcomes[idx];
        out.point.n_a = a;
        out.point.n_vdp = v;
        out.point.n_wg = w;
        try {
            AcceleratorConfig cfg = base;
            cfg.n_a = cfg.n_w = a;
            cfg.n_vdp = v;
            cfg.n_wg = w;
            cfg.n_b = spec.n_b;
            cfg.validate();
            (void)wavelength_assignment(cfg, platform.activation_mr.resonant_wavelength_nm, platform.usable_band_nm());
            FpvStatistics stats = fpv;
            stats.seed = derive_seed(seed, config_key(a, v, w));
            const ChipFpvMap map = sample_chip_fpv(cfg, platform, stats, cfg.mrs_per_arm());
            double fps = 0.0, power = 0.0, epb = 0.0;
            std::size_t epb_count = 0;
            for (const auto& wl : spec.workloads) {
                const SimReport r = power_and_epb(wl, cfg, platform, map, spec.tuning_fraction);
                fps += r.fps;
                power += r.total_power_mw;
                out.point.area_mm2 = r.area_mm2;
                if (r.epb_pj_per_bit) {
                    epb += *r.epb_pj_per_bit;
                    ++epb_count;
                }
            }
            const double n = static_cast<double>(spec.workloads.size());
            out.point.fps = fps / n;
            out.point.power_mw = power / n;
            if (epb_count > 0) out.point.epb_pj_per_bit = epb / static_cast<double>(epb_count);
            out.ok = true;
        } catch (const PhysicalConstraintError& e) {
            out.reason = e.what();
        } catch (const ConfigError& e) {
            out.reason = e.what();
        }
    };

    const std::size_t threads = std::min(spec.threads, std::max<std::size_t>(grid.size(), 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = next++; i < grid.size(); i = next++) evaluate(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    ParetoResult result;
    for (auto& o : outcomes) {
        if (o.ok)
            result.points.push_back(o.point);
        else
            result.excluded.push_back({o.point.n_a, o.point.n_vdp, o.point.n_wg, o.reason});
    }
    finalize(result);
    return result;
}

std::string scatter_csv(const ParetoResult& result) {
    std::string out = "n_a,n_vdp,n_wg,fps,epb_pj_per_bit,power_mw,area_mm2,pareto\n";
    for (const auto& p : result.points) {
        out += std::to_string(p.n_a) + ',' + std::to_string(p.n_vdp) + ',' + std::to_string(p.n_wg) + ',';
        out += format_sig9(p.fps) + ',';
        out += (p.epb_pj_per_bit ? format_sig9(*p.epb_pj_per_bit) : std::string()) + ',';
        out += format_sig9(p.power_mw) + ',' + format_sig9(p.area_mm2) + ',' + (p.pareto ? "1" : "0") + '\n';
    }
    return out;
}

std::vector<DsePoint> parse_scatter_csv(const std::string& text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "n_a,n_vdp,n_wg,fps,epb_pj_per_bit,power_mw,area_mm2,pareto")
        throw DataError("scatter CSV header missing or unexpected");
    auto to_size = [](const std::string& s) {
        const double v = parse_double(s);
        if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) throw DataError("bad integer field '" + s + "'");
        return static_cast<std::size_t>(v);
    };
    std::vector<DsePoint> pts;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() != 8) throw DataError("scatter CSV row " + std::to_string(i) + " has the wrong field count");
        DsePoint p;
        p.n_a = to_size(f[0]);
        p.n_vdp = to_size(f[1]);
        p.n_wg = to_size(f[2]);
        p.fps = parse_double(f[3]);
        if (!f[4].empty()) p.epb_pj_per_bit = parse_double(f[4]);
        p.power_mw = parse_double(f[5]);
        p.area_mm2 = parse_double(f[6]);
        if (f[7] != "0" && f[7] != "1") throw DataError("pareto flag must be 0 or 1");
        p.pareto = f[7] == "1";
        pts.push_back(p);
    }
    return pts;
}

std::string picks_summary_json(const ParetoResult& result) {
    using nlohmann::ordered_json;
    auto point_json = [&](std::size_t i) {
        const auto& p = result.points[i];
        ordered_json j;
        j["n_a"] = p.n_a;
        j["n_vdp"] = p.n_vdp;
        j["n_wg"] = p.n_wg;
        j["fps"] = p.fps;
        j["power_mw"] = p.power_mw;
        j["fps_per_watt"] = p.fps_per_watt();
        j["epb_pj_per_bit"] = p.epb_pj_per_bit ? ordered_json(*p.epb_pj_per_bit) : ordered_json(nullptr);
        j["area_mm2"] = p.area_mm2;
        return j;
    };
    ordered_json j;
    j["evaluated"] = result.points.size();
    j["pareto_count"] = std::count_if(result.points.begin(), result.points.end(), [](const DsePoint& p) { return p.pareto; });
    j["eo_pick"] = result.eo_pick ? point_json(*result.eo_pick) : ordered_json(nullptr);
    j["po_pick"] = result.po_pick ? point_json(*result.po_pick) : ordered_json(nullptr);
    ordered_json ex = ordered_json::array();
    for (const auto& e : result.excluded)
        ex.push_back({{"n_a", e.n_a}, {"n_vdp", e.n_vdp}, {"n_wg", e.n_wg}, {"reason", e.reason}});
    j["excluded"] = ex;
    return j.dump(2) + "\n";
}

} // namespace mrbnn
