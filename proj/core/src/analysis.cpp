#include "hawkes/analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "hawkes/errors.hpp"

namespace hawkes {

namespace {

constexpr double kScanStep = 1e-4;
constexpr double kSimpsonTol = 1e-7;
constexpr int kSimpsonDepth = 40;
constexpr double kWindowSlack = 1e-9;

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool piecewise_constant(const Kernel& h) { return h.is_null() || h.is_step(); }

std::vector<double> knot_points(const Kernel& h) {
    std::vector<double> out{0.0};
    if (const auto* s = h.as_step()) out.insert(out.end(), s->knots.begin(), s->knots.end());
    out.push_back(h.support());
    return out;
}

// a - b as one step function on the merged knots; empty heights if both are null.
StepKernel step_difference(const Kernel& a, const Kernel& b) {
    auto pts = knot_points(a);
    const auto pb = knot_points(b);
    pts.insert(pts.end(), pb.begin(), pb.end());
    pts = sorted_unique(std::move(pts));
    StepKernel d;
    if (pts.size() < 2) return d;
    d.knots = pts;
    d.heights.resize(pts.size() - 1);
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        const double m = 0.5 * (pts[j] + pts[j + 1]);
        d.heights[j] = a(m) - b(m);
    }
    return d;
}

double difference_integral(const Kernel& a, const Kernel& b, double lo, double hi) {
    return a.integral(lo, hi) - b.integral(lo, hi);
}

double bisect_root(const Kernel& a, const Kernel& b, double lo, double hi) {
    double flo = a(lo) - b(lo);
    for (int i = 0; i < 100 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = a(mid) - b(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double adaptive_simpson(const auto& f, double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double simpson(const auto& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, kSimpsonDepth);
}

void require_window(const EventSequence& seq, double support, double horizon) {
    if (!(horizon > 0.0)) throw ConfigError("d1T: horizon must be > 0");
    if (seq.t_start() > -support + kWindowSlack || seq.t_end() < horizon - kWindowSlack)
        throw ConfigError("d1T: events must cover [-A, T]");
}

double step_d1T_mark(const HawkesModel& f, const HawkesModel& g, const EventSequence& seq, double horizon,
                     std::size_t k) {
    const std::size_t dim = f.dim();
    std::vector<StepKernel> diff(dim);
    std::vector<bool> active(dim, false);
    for (std::size_t l = 0; l < dim; ++l) {
        diff[l] = step_difference(f.kernel(l, k), g.kernel(l, k));
        for (double h : diff[l].heights) active[l] = active[l] || h != 0.0;
    }
    std::vector<std::pair<double, double>> jumps;
    for (const auto& e : seq.events()) {
        const auto l = static_cast<std::size_t>(e.mark);
        if (!active[l] || e.time >= horizon) continue;
        const auto& d = diff[l];
        if (e.time + d.knots.back() <= 0.0) continue;
        double prev = 0.0;
        for (std::size_t j = 0; j < d.heights.size(); ++j) {
            jumps.emplace_back(e.time + d.knots[j], d.heights[j] - prev);
            prev = d.heights[j];
        }
        jumps.emplace_back(e.time + d.knots.back(), -prev);
    }
    std::sort(jumps.begin(), jumps.end());
    double level = f.nu(k) - g.nu(k);
    double cur = 0.0;
    double total = 0.0;
    for (const auto& [t, dv] : jumps) {
        if (t >= horizon) break;
        if (t > cur) {
            total += std::abs(level) * (t - cur);
            cur = t;
        }
        level += dv;
    }
    total += std::abs(level) * (horizon - cur);
    return total;
}

double generic_d1T_mark(const HawkesModel& f, const HawkesModel& g, const EventSequence& seq, double horizon,
                        std::size_t k) {
    const auto events = seq.events();
    const double a = std::max(f.support(), g.support());
    auto delta_lambda = [&](double t) {
        double v = f.nu(k) - g.nu(k);
        auto first = std::lower_bound(events.begin(), events.end(), t - a,
                                      [](const Event& e, double x) { return e.time < x; });
        for (auto it = first; it != events.end() && it->time < t; ++it) {
            const auto l = static_cast<std::size_t>(it->mark);
            v += f.kernel(l, k)(t - it->time) - g.kernel(l, k)(t - it->time);
        }
        return std::abs(v);
    };
    std::vector<std::vector<double>> offsets(f.dim());
    for (std::size_t l = 0; l < f.dim(); ++l) {
        auto& o = offsets[l];
        o = {0.0, f.kernel(l, k).support(), g.kernel(l, k).support()};
        const auto bf = f.kernel(l, k).breakpoints();
        const auto bg = g.kernel(l, k).breakpoints();
        o.insert(o.end(), bf.begin(), bf.end());
        o.insert(o.end(), bg.begin(), bg.end());
        o = sorted_unique(std::move(o));
    }
    std::vector<double> pts{0.0, horizon};
    for (const auto& e : events) {
        if (e.time >= horizon || e.time + a <= 0.0) continue;
        for (double o : offsets[static_cast<std::size_t>(e.mark)]) {
            const double t = e.time + o;
            if (t > 0.0 && t < horizon) pts.push_back(t);
        }
    }
    pts = sorted_unique(std::move(pts));
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i];
        const double hi = pts[i + 1];
        if (!(hi > lo)) continue;
        // evaluate just inside the segment so jumps at its ends do not leak in
        const double eps = 1e-12 * (hi - lo);
        total += simpson(delta_lambda, lo + eps, hi, kSimpsonTol) + eps * delta_lambda(lo + eps);
    }
    return total;
}

double param_value_at(const KernelParam& p, double t) {
    if (!p.delta) return 0.0;
    const int j = step_bin(p.knots, t);
    return j < 0 ? 0.0 : p.beta[static_cast<std::size_t>(j)];
}

ScalarSummary scalar_summary(std::vector<double> v) {
    ScalarSummary s;
    if (v.empty()) return s;
    const double n = static_cast<double>(v.size());
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    std::sort(v.begin(), v.end());
    auto sorted_q = [&](double q) {
        const double h = (n - 1.0) * q;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
    };
    s.median = sorted_q(0.5);
    s.low = sorted_q(0.05);
    s.high = sorted_q(0.95);
    return s;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

double l1_kernel_distance(const Kernel& a, const Kernel& b) {
    if (piecewise_constant(a) && piecewise_constant(b)) {
        const auto d = step_difference(a, b);
        double total = 0.0;
        for (std::size_t j = 0; j < d.heights.size(); ++j)
            total += std::abs(d.heights[j]) * (d.knots[j + 1] - d.knots[j]);
        return total;
    }
    std::vector<double> pts{0.0, a.support(), b.support()};
    for (const auto& h : {&a, &b}) {
        const auto bp = h->breakpoints();
        pts.insert(pts.end(), bp.begin(), bp.end());
    }
    pts = sorted_unique(std::move(pts));
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i];
        const double hi = pts[i + 1];
        if (!(hi > lo)) continue;
        const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / kScanStep));
        std::vector<double> cuts{lo};
        double x0 = lo + 1e-12 * (hi - lo);
        double f0 = a(x0) - b(x0);
        for (std::size_t c = 1; c <= cells; ++c) {
            const double x1 = c == cells ? hi : lo + (hi - lo) * static_cast<double>(c) / static_cast<double>(cells);
            const double f1 = a(x1) - b(x1);
            if ((f0 > 0.0 && f1 < 0.0) || (f0 < 0.0 && f1 > 0.0)) cuts.push_back(bisect_root(a, b, x0, x1));
            x0 = x1;
            f0 = f1;
        }
        cuts.push_back(hi);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
            total += std::abs(difference_integral(a, b, cuts[c], cuts[c + 1]));
    }
    return total;
}

double l1_param_distance(const HawkesModel& f, const HawkesModel& g) {
    if (f.dim() != g.dim()) throw ConfigError("l1 distance: models have different K");
    double total = 0.0;
    for (std::size_t k = 0; k < f.dim(); ++k) total += std::abs(f.nu(k) - g.nu(k));
    for (std::size_t l = 0; l < f.dim(); ++l)
        for (std::size_t k = 0; k < f.dim(); ++k) total += l1_kernel_distance(f.kernel(l, k), g.kernel(l, k));
    return total;
}

double d1T_distance(const HawkesModel& f, const HawkesModel& g, const EventSequence& seq, double horizon) {
    if (f.dim() != g.dim() || static_cast<std::size_t>(seq.dim()) != f.dim())
        throw ConfigError("d1T: models and events must share K");
    require_window(seq, std::max(f.support(), g.support()), horizon);
    const bool exact = f.all_step() && g.all_step();
    double total = 0.0;
    for (std::size_t k = 0; k < f.dim(); ++k)
        total += exact ? step_d1T_mark(f, g, seq, horizon, k) : generic_d1T_mark(f, g, seq, horizon, k);
    return total / horizon;
}

HawkesModel record_model(const TraceRecord& rec, double support) {
    std::vector<Kernel> kernels;
    kernels.reserve(rec.kernels.size());
    for (const auto& p : rec.kernels) kernels.push_back(to_kernel(p));
    return HawkesModel(support, rec.nu, std::move(kernels));
}

DMetrics estimate_D1_D2(std::span<const ReplicateDraws> replicates, const HawkesModel& truth, bool with_d2,
                        std::size_t stride) {
    if (replicates.empty()) throw ConfigError("D metrics: no replicates");
    if (stride == 0) throw ConfigError("D metrics: stride must be >= 1");
    DMetrics out;
    const std::size_t dim = truth.dim();
    for (const auto& rep : replicates) {
        if (!rep.trace || rep.trace->records.empty()) throw ConfigError("D metrics: empty trace");
        if (with_d2 && !rep.data) throw ConfigError("D metrics: replicate data required for D2");
        double s1 = 0.0;
        double s2 = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < rep.trace->records.size(); i += stride) {
            const auto model = record_model(rep.trace->records[i], rep.trace->support);
            if (model.dim() != dim) throw ConfigError("D metrics: trace and truth have different K");
            double h = 0.0;
            for (std::size_t l = 0; l < dim; ++l)
                for (std::size_t k = 0; k < dim; ++k) h += l1_kernel_distance(model.kernel(l, k), truth.kernel(l, k));
            s1 += h / static_cast<double>(dim * dim);
            if (with_d2) s2 += d1T_distance(model, truth, *rep.data, rep.trace->horizon);
            ++n;
        }
        out.d1_per_replicate.push_back(s1 / static_cast<double>(n));
        if (with_d2) out.d2_per_replicate.push_back(s2 / static_cast<double>(n));
    }
    auto mean = [](const std::vector<double>& v) {
        return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    out.d1 = mean(out.d1_per_replicate);
    out.d2 = mean(out.d2_per_replicate);
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ConfigError("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - std::floor(h)) * (values[hi] - values[lo]);
}

PosteriorSummary summarize(const ChainTrace& trace, std::size_t grid_points) {
    if (trace.records.empty()) throw ConfigError("summarize: trace has no records");
    if (grid_points == 0) throw ConfigError("summarize: grid must have at least one point");
    PosteriorSummary s;
    s.dim = trace.dim;
    s.support = trace.support;
    s.draws = trace.records.size();
    s.grid.resize(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i)
        s.grid[i] = trace.support * static_cast<double>(i + 1) / static_cast<double>(grid_points);

    const std::size_t pairs = trace.dim * trace.dim;
    s.kernels.resize(pairs);
    s.edge_probability.assign(pairs, 0.0);
    std::vector<double> column(s.draws);
    for (std::size_t p = 0; p < pairs; ++p) {
        auto& band = s.kernels[p];
        band.mean.resize(grid_points);
        band.median.resize(grid_points);
        band.low.resize(grid_points);
        band.high.resize(grid_points);
        for (const auto& rec : trace.records)
            if (rec.kernels[p].delta) s.edge_probability[p] += 1.0;
        s.edge_probability[p] /= static_cast<double>(s.draws);
        for (std::size_t i = 0; i < grid_points; ++i) {
            for (std::size_t d = 0; d < s.draws; ++d) column[d] = param_value_at(trace.records[d].kernels[p], s.grid[i]);
            const auto sum = scalar_summary(column);
            band.mean[i] = sum.mean;
            band.median[i] = sum.median;
            band.low[i] = sum.low;
            band.high[i] = sum.high;
        }
    }
    s.nu.resize(trace.dim);
    for (std::size_t k = 0; k < trace.dim; ++k) {
        for (std::size_t d = 0; d < s.draws; ++d) column[d] = trace.records[d].nu[k];
        s.nu[k] = scalar_summary(column);
    }
    for (std::size_t d = 0; d < s.draws; ++d) column[d] = trace.records[d].eta;
    s.eta = scalar_summary(column);
    return s;
}

Graph extract_graph(std::size_t dim, std::span<const double> edge_probability, double threshold) {
    if (edge_probability.size() != dim * dim) throw ConfigError("graph: need K x K edge probabilities");
    Graph g;
    g.dim = dim;
    std::string dot = "digraph hawkes {\n  node [shape=circle];\n";
    for (std::size_t k = 0; k < dim; ++k) dot += "  " + std::to_string(k + 1) + ";\n";
    for (std::size_t l = 0; l < dim; ++l) {
        for (std::size_t k = 0; k < dim; ++k) {
            const double p = edge_probability[l * dim + k];
            if (!(p >= threshold)) continue;
            g.edges.push_back({l, k, p});
            char buf[160];
            std::snprintf(buf, sizeof buf, "  %zu -> %zu [weight=%.4f, penwidth=%.3f, label=\"%.3f\"];\n", l + 1,
                          k + 1, p, 0.5 + 4.0 * p, p);
            dot += buf;
        }
    }
    dot += "}\n";
    g.dot = std::move(dot);
    return g;
}

Graph extract_graph(const PosteriorSummary& summary, double threshold) {
    return extract_graph(summary.dim, summary.edge_probability, threshold);
}

std::string summary_to_json(const PosteriorSummary& summary) {
    using nlohmann::ordered_json;
    auto scalar = [](const ScalarSummary& s) {
        return ordered_json{{"mean", s.mean}, {"sd", s.sd}, {"median", s.median}, {"q05", s.low}, {"q95", s.high}};
    };
    ordered_json j;
    j["K"] = summary.dim;
    j["A"] = summary.support;
    j["draws"] = summary.draws;
    j["grid"] = summary.grid;
    j["edge_probability"] = summary.edge_probability;
    auto& nu = j["nu"] = ordered_json::array();
    for (const auto& s : summary.nu) nu.push_back(scalar(s));
    j["eta"] = scalar(summary.eta);
    auto& ks = j["kernels"] = ordered_json::array();
    for (std::size_t p = 0; p < summary.kernels.size(); ++p) {
        const auto& b = summary.kernels[p];
        ks.push_back({{"source", p / summary.dim + 1},
                      {"target", p % summary.dim + 1},
                      {"mean", b.mean},
                      {"median", b.median},
                      {"q05", b.low},
                      {"q95", b.high}});
    }
    return j.dump(2);
}

std::string band_csv(const PosteriorSummary& summary, std::size_t l, std::size_t k) {
    if (l >= summary.dim || k >= summary.dim) throw ConfigError("band_csv: mark out of range");
    const auto& b = summary.kernels[l * summary.dim + k];
    std::string out = "t,mean,median,q05,q95\n";
    for (std::size_t i = 0; i < summary.grid.size(); ++i)
        out += fmt(summary.grid[i]) + ',' + fmt(b.mean[i]) + ',' + fmt(b.median[i]) + ',' + fmt(b.low[i]) + ',' +
               fmt(b.high[i]) + '\n';
    return out;
}

void write_summary(const PosteriorSummary& summary, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto put = [](const std::filesystem::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + path.string());
        out << text;
    };
    put(dir / "summary.json", summary_to_json(summary) + "\n");
    for (std::size_t l = 0; l < summary.dim; ++l)
        for (std::size_t k = 0; k < summary.dim; ++k)
            put(dir / ("band_" + std::to_string(l + 1) + "_" + std::to_string(k + 1) + ".csv"), band_csv(summary, l, k));
    put(dir / "graph.dot", extract_graph(summary, 0.5).dot);
}

}  // namespace hawkes
