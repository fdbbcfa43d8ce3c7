#include "pascs_qkd/analysis.hpp"

#include "parallel.hpp"
#include "pascs_qkd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace pascs {

namespace {

double parse_number(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(fmt::format("not a number: '{}'", text));
    }
    if (used != text.size() || !std::isfinite(value)) {
        throw std::invalid_argument(fmt::format("not a number: '{}'", text));
    }
    return value;
}

double rate_at(StateFamily family, double alpha, const ChannelParams& ch, const DetectionParams& det,
               const Conventions& conventions, const TruncationPolicy& truncation) {
    return key_rate(alpha, family, ch, det, conventions, truncation).key_rate;
}

}  // namespace

double default_alpha(StateFamily family) {
    return family == StateFamily::pascs ? 0.13 : 0.25;
}

DistanceGrid DistanceGrid::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t begin = 0;
    for (;;) {
        const auto colon = text.find(':', begin);
        parts.push_back(text.substr(begin, colon == std::string::npos ? std::string::npos : colon - begin));
        if (colon == std::string::npos) break;
        begin = colon + 1;
    }
    DistanceGrid grid;
    if (parts.size() == 1) {
        grid.start = grid.stop = parse_number(parts[0]);
        grid.step = 1.0;
    } else if (parts.size() == 3) {
        grid.start = parse_number(parts[0]);
        grid.stop = parse_number(parts[1]);
        grid.step = parse_number(parts[2]);
    } else {
        throw std::invalid_argument(fmt::format("distance range must be 'start:stop:step', got '{}'", text));
    }
    grid.validate();
    return grid;
}

void DistanceGrid::validate() const {
    if (start < 0.0) throw std::invalid_argument("distance range must start at >= 0 km");
    if (stop < start) throw std::invalid_argument("distance range is empty (stop < start)");
    if (!(step > 0.0)) throw std::invalid_argument("distance step must be > 0");
}

std::vector<double> DistanceGrid::points() const {
    validate();
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
    return out;
}

void SweepSpec::validate() const {
    if (protocols.empty()) throw std::invalid_argument("sweep needs at least one protocol");
    if (excess_noise.empty()) throw std::invalid_argument("sweep needs at least one excess-noise value");
    distances.validate();
    for (double xi : excess_noise) {
        if (!(xi >= 0.0) || !std::isfinite(xi)) throw std::invalid_argument("excess noise must be >= 0");
    }
    for (const auto& p : protocols) {
        if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) throw std::invalid_argument("alpha must be > 0");
    }
    detection().validate();
    if (!(loss_db_per_km > 0.0)) throw std::invalid_argument("loss rate must be > 0 dB/km");
    if (!(k_min > 0.0)) throw std::invalid_argument("K_min must be > 0");
}

Cutoff find_cutoff(const std::vector<double>& distances_km, const std::vector<RatePoint>& points,
                   double threshold, bool strict) {
    Cutoff cut;
    const std::size_t n = std::min(distances_km.size(), points.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double k = points[i].key_rate;
        const bool pass = strict ? k > threshold : k >= threshold;
        if (!pass) {
            if (i > 0) cut.distance_km = distances_km[i - 1];
            return cut;
        }
    }
    if (n > 0) {
        cut.distance_km = distances_km[n - 1];
        cut.censored = true;
    }
    return cut;
}

SweepResult sweep_distance(const SweepSpec& spec) {
    spec.validate();
    const auto distances = spec.distances.points();
    const auto det = spec.detection();

    SweepResult result;
    result.spec = spec;
    std::vector<SignalMoments> moments;
    for (const auto& protocol : spec.protocols) {
        for (double xi : spec.excess_noise) {
            Curve curve;
            curve.protocol = protocol;
            curve.excess_noise = xi;
            curve.distances_km = distances;
            SignalMoments m;
            try {
                if (spec.reoptimize_at_km) {
                    const auto ch = ChannelParams::from_distance(*spec.reoptimize_at_km, xi, spec.loss_db_per_km);
                    curve.protocol.alpha =
                        optimize_alpha(protocol.family, ch, det, {}, spec.conventions, spec.truncation).alpha;
                }
                m = signal_moments(curve.protocol.family, curve.protocol.alpha, spec.truncation);
                curve.points.resize(distances.size());
            } catch (const std::exception& e) {
                curve.diagnostic = e.what();
            }
            moments.push_back(m);
            result.curves.push_back(std::move(curve));
        }
    }

    const std::size_t per_curve = distances.size();
    std::vector<std::string> errors(result.curves.size() * per_curve);
    detail::parallel_for(result.curves.size() * per_curve, [&](std::size_t task) {
        const std::size_t c = task / per_curve;
        const std::size_t i = task % per_curve;
        auto& curve = result.curves[c];
        if (!curve.ok()) return;
        try {
            const auto ch = ChannelParams::from_distance(distances[i], curve.excess_noise, spec.loss_db_per_km);
            curve.points[i] = key_rate(moments[c], curve.protocol.alpha, curve.protocol.family, ch, det,
                                       spec.conventions);
        } catch (const std::exception& e) {
            errors[task] = fmt::format("{} at {} km: {}", to_string(curve.protocol.family), distances[i], e.what());
        }
    });

    for (std::size_t c = 0; c < result.curves.size(); ++c) {
        auto& curve = result.curves[c];
        for (std::size_t i = 0; i < per_curve && curve.ok(); ++i) {
            if (!errors[c * per_curve + i].empty()) curve.diagnostic = errors[c * per_curve + i];
        }
        if (!curve.ok()) {
            curve.points.clear();
            continue;
        }
        curve.positive_cutoff = find_cutoff(curve.distances_km, curve.points, 0.0, true);
        curve.threshold_cutoff = find_cutoff(curve.distances_km, curve.points, spec.k_min, false);
    }
    return result;
}

OptimizeResult optimize_alpha(StateFamily family, const ChannelParams& ch, const DetectionParams& det,
                              const OptimizeOptions& options, const Conventions& conventions,
                              const TruncationPolicy& truncation) {
    if (!(options.lower > 0.0 && options.upper <= 1.5 && options.lower < options.upper)) {
        throw std::invalid_argument(fmt::format("alpha bounds must satisfy 0 < lower < upper <= 1.5, got [{}, {}]",
                                                options.lower, options.upper));
    }
    if (!(options.tol > 0.0) || options.prescan_points < 3) {
        throw std::invalid_argument("optimizer needs tol > 0 and at least 3 pre-scan points");
    }
    const auto k_of = [&](double a) { return rate_at(family, a, ch, det, conventions, truncation); };

    OptimizeResult out;
    const int n = options.prescan_points;
    std::vector<double> alphas(static_cast<std::size_t>(n));
    std::vector<double> rates(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        alphas[static_cast<std::size_t>(i)] = options.lower + (options.upper - options.lower) * i / (n - 1);
    }
    detail::parallel_for(alphas.size(), [&](std::size_t i) { rates[i] = k_of(alphas[i]); });

    const auto best = static_cast<std::size_t>(std::max_element(rates.begin(), rates.end()) - rates.begin());

    // unimodal: rises (weakly) then falls (weakly); count rise->fall turns
    int turns = 0;
    int trend = 0;
    for (std::size_t i = 1; i < rates.size(); ++i) {
        const double d = rates[i] - rates[i - 1];
        const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (s == 0) continue;
        if (trend == -1 && s == 1) ++turns;
        trend = s;
    }
    out.unimodal = turns == 0;
    out.alpha = alphas[best];
    out.key_rate = rates[best];

    if (out.unimodal) {
        // golden-section inside the bracket around the grid maximum
        double lo = alphas[best == 0 ? 0 : best - 1];
        double hi = alphas[std::min(best + 1, alphas.size() - 1)];
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - inv_phi * (hi - lo);
        double x2 = lo + inv_phi * (hi - lo);
        double f1 = k_of(x1);
        double f2 = k_of(x2);
        while (hi - lo > 0.1 * options.tol) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = k_of(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = k_of(x1);
            }
        }
        const double a = 0.5 * (lo + hi);
        const double k = k_of(a);
        if (k >= out.key_rate) {
            out.alpha = a;
            out.key_rate = k;
        }
    }

    out.prescan_alpha = std::move(alphas);
    out.prescan_rate = std::move(rates);
    // K is a difference of O(1e-2) terms; anything below this is rounding noise
    constexpr double kRateFloor = 1e-14;
    if (!(out.key_rate > kRateFloor)) {
        throw NoSecureOperatingPoint(fmt::format(
            "no positive key rate for {} on alpha in [{}, {}] (best K = {:.3e} at alpha = {:.4f})",
            to_string(family), options.lower, options.upper, out.key_rate, out.alpha));
    }
    return out;
}

ProtocolComparison compare_protocols(const SweepSpec& spec, const ProtocolSpec& first, const ProtocolSpec& second) {
    SweepSpec both = spec;
    both.protocols = {first, second};

    ProtocolComparison cmp;
    cmp.first = first;
    cmp.second = second;
    cmp.sweep = sweep_distance(both);

    const std::size_t per_protocol = spec.excess_noise.size();
    for (std::size_t j = 0; j < per_protocol; ++j) {
        const Curve& a = cmp.sweep.curves[j];
        const Curve& b = cmp.sweep.curves[per_protocol + j];
        if (!a.ok() || !b.ok()) {
            throw std::runtime_error(fmt::format("comparison at xi = {} failed: {}", a.excess_noise,
                                                 a.ok() ? *b.diagnostic : *a.diagnostic));
        }
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            DominanceRow row{a.distances_km[i], a.excess_noise, a.points[i].key_rate, b.points[i].key_rate, false};
            row.first_dominates = row.k_first >= row.k_second - kDominanceSlack;
            if (!row.first_dominates) {
                cmp.all_dominant = false;
                ++cmp.violations;
            }
            cmp.rows.push_back(row);
        }
        CutoffGap gap;
        gap.excess_noise = a.excess_noise;
        gap.first_positive = a.positive_cutoff;
        gap.second_positive = b.positive_cutoff;
        gap.first_threshold = a.threshold_cutoff;
        gap.second_threshold = b.threshold_cutoff;
        if (a.positive_cutoff.distance_km && b.positive_cutoff.distance_km) {
            gap.positive_gap_km = *a.positive_cutoff.distance_km - *b.positive_cutoff.distance_km;
        }
        if (a.threshold_cutoff.distance_km && b.threshold_cutoff.distance_km) {
            gap.threshold_gap_km = *a.threshold_cutoff.distance_km - *b.threshold_cutoff.distance_km;
        }
        cmp.gaps.push_back(gap);
    }
    return cmp;
}

}  // namespace pascs
