#pragma once
//! \file report.hpp
//! \brief CSV, JSON-summary and SVG writers for experiment results. Outputs
//! are pure functions of the results (no timestamps), so reruns are
//! byte-identical.

#include "rsparse/concentration.hpp"
#include "rsparse/recovery.hpp"

#include <map>

namespace rsparse::report {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string smin_csv(const SminExperimentResult& r) {
    std::string out = "trialIndex,sigmaMin,xiS,xiA,xiB,xiX\n";
    for (const auto& t : r.trials) {
        const auto& c = t.chain;
        out += std::to_string(t.trialIndex) + ',' + num(c.sigmaMin) + ',' + num(c.xiS) + ',' +
               num(c.xiA) + ',' + num(c.xiB) + ',' + num(c.xiX) + '\n';
    }
    return out;
}

inline nlohmann::json smin_summary(const SminExperimentResult& r, const DictionaryStats& st) {
    nlohmann::json viol;
    for (std::size_t k = 0; k < r.violations.size(); ++k)
        viol[std::string(kChainInequalityNames[k])] = r.violations[k];
    const auto ab = alpha_beta(st, r.nA, r.nB, r.s);
    const auto tail = tail_probability(ab.u, ab);
    return {{"experiment", "smin"},
            {"nA", r.nA},
            {"nB", r.nB},
            {"s", r.s},
            {"seed", r.masterSeed},
            {"strategy", r.strategy},
            {"trials", r.trials.size()},
            {"failures", r.failures},
            {"empirical_failure_rate", r.empiricalFailureRate},
            {"lemma1_bound", r.lemma1Bound},
            {"tail_bound", tail.bound},
            {"tail_threshold", tail.threshold},
            {"alpha", ab.alpha},
            {"beta", ab.beta},
            {"Q1", ab.Q1},
            {"u", ab.u},
            {"conditions_hold", r.conditionsHold},
            {"gamma", r.gamma ? nlohmann::json(*r.gamma) : nlohmann::json(nullptr)},
            {"bound_respected", r.boundRespected},
            {"chain_violations", viol},
            {"dictionary", to_json(st)}};
}

inline std::string moments_csv(const MomentResult& r) {
    std::string out = "trialIndex,xiB,xiX\n";
    for (std::size_t t = 0; t < r.xiBSamples.size(); ++t)
        out += std::to_string(t) + ',' + num(r.xiBSamples[t]) + ',' + num(r.xiXSamples[t]) + '\n';
    return out;
}

inline nlohmann::json to_json(const MomentEstimate& e) {
    return {{"estimate", e.estimate}, {"lower95", e.lower95}, {"upper95", e.upper95},
            {"bound", e.bound},       {"bound_valid", e.boundValid},
            {"within_bound", e.upper95 <= e.bound}};
}

inline nlohmann::json moments_summary(const MomentResult& r, std::uint64_t seed,
                                      const DictionaryStats& st) {
    return {{"experiment", "moments"}, {"nA", r.nA},          {"nB", r.nB},
            {"q", r.q},                {"trials", r.trials},  {"seed", seed},
            {"xiB", to_json(r.xiB)},   {"xiX", to_json(r.xiX)}, {"dictionary", to_json(st)}};
}

inline std::string grid_csv(const PhaseTransitionGrid& g) {
    std::string out = "nA,nB,strategy,trials,successes,rate\n";
    for (const auto& c : g.cells)
        out += std::to_string(c.nA) + ',' + std::to_string(c.nB) + ',' + c.strategy + ',' +
               std::to_string(c.trials) + ',' + std::to_string(c.successes) + ',' +
               num(c.rate()) + '\n';
    return out;
}

//! Success rate per total sparsity nA + nB, pooled over cells, per strategy.
inline std::map<std::string, std::map<std::size_t, std::pair<std::size_t, std::size_t>>>
rate_by_total(const PhaseTransitionGrid& g) {
    std::map<std::string, std::map<std::size_t, std::pair<std::size_t, std::size_t>>> out;
    for (const auto& c : g.cells) {
        auto& slot = out[c.strategy][c.nA + c.nB];
        slot.first += c.successes;
        slot.second += c.trials;
    }
    return out;
}

inline nlohmann::json grid_summary(const PhaseTransitionGrid& g, std::uint64_t seed,
                                   const DictionaryStats& st) {
    nlohmann::json series = nlohmann::json::object();
    for (const auto& [strategy, byTotal] : rate_by_total(g)) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& [total, st2] : byTotal)
            pts.push_back({{"total", total},
                           {"successes", st2.first},
                           {"trials", st2.second},
                           {"rate", static_cast<double>(st2.first) / static_cast<double>(st2.second)}});
        series[strategy] = pts;
    }
    std::size_t trials = 0, successes = 0, converged = 0;
    for (const auto& c : g.cells) {
        trials += c.trials;
        successes += c.successes;
        converged += c.converged;
    }
    return {{"experiment", "recover"}, {"seed", seed},        {"cells", g.cells.size()},
            {"trials", trials},        {"successes", successes}, {"converged", converged},
            {"series_by_total_sparsity", series}, {"dictionary", to_json(st)}};
}

// ---------------------------------------------------------------------------
// Minimal SVG charts.

class Svg {
public:
    static constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 20, kTop = 40,
                            kBottom = 50;

    Svg(std::string title, double xMin, double xMax, double yMin, double yMax)
        : xMin_(xMin), xMax_(xMax > xMin ? xMax : xMin + 1), yMin_(yMin),
          yMax_(yMax > yMin ? yMax : yMin + 1) {
        body_ += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
                 title + "</text>\n";
        axes();
    }

    double px(double x) const {
        return kLeft + (x - xMin_) / (xMax_ - xMin_) * (kWidth - kLeft - kRight);
    }
    double py(double y) const {
        return kHeight - kBottom - (y - yMin_) / (yMax_ - yMin_) * (kHeight - kTop - kBottom);
    }

    void rect(double x0, double y0, double x1, double y1, const std::string& fill) {
        body_ += "<rect x=\"" + num(px(x0)) + "\" y=\"" + num(py(y1)) + "\" width=\"" +
                 num(px(x1) - px(x0)) + "\" height=\"" + num(py(y0) - py(y1)) + "\" fill=\"" +
                 fill + "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
        body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"";
        for (const auto& [x, y] : pts) body_ += num(px(x)) + ',' + num(py(y)) + ' ';
        body_ += "\"/>\n";
    }

    void hline(double y, const std::string& color, const std::string& label) {
        body_ += "<line x1=\"" + num(px(xMin_)) + "\" x2=\"" + num(px(xMax_)) + "\" y1=\"" +
                 num(py(y)) + "\" y2=\"" + num(py(y)) + "\" stroke=\"" + color +
                 "\" stroke-dasharray=\"6,4\"/>\n";
        text(xMax_, y, label, color, "end");
    }

    void vline(double x, const std::string& color, const std::string& label) {
        body_ += "<line x1=\"" + num(px(x)) + "\" x2=\"" + num(px(x)) + "\" y1=\"" + num(py(yMin_)) +
                 "\" y2=\"" + num(py(yMax_)) + "\" stroke=\"" + color +
                 "\" stroke-dasharray=\"6,4\"/>\n";
        text(x, yMax_, label, color, "start");
    }

    void text(double x, double y, const std::string& s, const std::string& color = "black",
              const std::string& anchor = "middle") {
        body_ += "<text x=\"" + num(px(x)) + "\" y=\"" + num(py(y) - 4) + "\" fill=\"" + color +
                 "\" font-size=\"12\" text-anchor=\"" + anchor + "\">" + s + "</text>\n";
    }

    void labels(const std::string& xLabel, const std::string& yLabel) {
        body_ += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 10) +
                 "\" text-anchor=\"middle\" font-size=\"13\">" + xLabel + "</text>\n";
        body_ += "<text x=\"16\" y=\"" + num(kHeight / 2) + "\" transform=\"rotate(-90 16 " +
                 num(kHeight / 2) + ")\" text-anchor=\"middle\" font-size=\"13\">" + yLabel +
                 "</text>\n";
    }

    std::string str() const {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
               "\" height=\"" + num(kHeight) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
               body_ + "</svg>\n";
    }

private:
    void axes() {
        body_ += "<line x1=\"" + num(px(xMin_)) + "\" y1=\"" + num(py(yMin_)) + "\" x2=\"" +
                 num(px(xMax_)) + "\" y2=\"" + num(py(yMin_)) + "\" stroke=\"black\"/>\n";
        body_ += "<line x1=\"" + num(px(xMin_)) + "\" y1=\"" + num(py(yMin_)) + "\" x2=\"" +
                 num(px(xMin_)) + "\" y2=\"" + num(py(yMax_)) + "\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double x = xMin_ + (xMax_ - xMin_) * i / 4.0;
            const double y = yMin_ + (yMax_ - yMin_) * i / 4.0;
            char bx[32], by[32];
            std::snprintf(bx, sizeof bx, "%.3g", x);
            std::snprintf(by, sizeof by, "%.3g", y);
            body_ += "<text x=\"" + num(px(x)) + "\" y=\"" + num(py(yMin_) + 16) +
                     "\" font-size=\"11\" text-anchor=\"middle\">" + bx + "</text>\n";
            body_ += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(y) + 4) +
                     "\" font-size=\"11\" text-anchor=\"end\">" + by + "</text>\n";
        }
    }

    double xMin_, xMax_, yMin_, yMax_;
    std::string body_;
};

inline std::string smin_svg(const SminExperimentResult& r) {
    const auto& h = r.histogram;
    const std::size_t peak = h.counts.empty() ? 1 : *std::max_element(h.counts.begin(), h.counts.end());
    Svg svg("sigma_min histogram (nA=" + std::to_string(r.nA) + ", nB=" + std::to_string(r.nB) + ")",
            h.lo, h.hi, 0.0, static_cast<double>(std::max<std::size_t>(peak, 1)));
    const double w = (h.hi - h.lo) / static_cast<double>(h.counts.size());
    for (std::size_t k = 0; k < h.counts.size(); ++k)
        svg.rect(h.lo + w * static_cast<double>(k), 0.0, h.lo + w * static_cast<double>(k + 1),
                 static_cast<double>(h.counts[k]), "steelblue");
    svg.vline(1.0 / std::sqrt(2.0), "crimson", "1/sqrt(2)");
    svg.labels("sigma_min(S)", "count");
    return svg.str();
}

inline std::string moments_svg(const MomentResult& r) {
    const double top = std::max({r.xiB.bound, r.xiB.upper95, r.xiX.bound, r.xiX.upper95, 1e-12}) * 1.1;
    Svg svg("moment estimates vs bounds (q=" + num(r.q) + ")", 0.0, 4.0, 0.0, top);
    svg.rect(0.2, 0.0, 0.8, r.xiB.estimate, "steelblue");
    svg.rect(1.2, 0.0, 1.8, r.xiB.bound, "lightgray");
    svg.rect(2.2, 0.0, 2.8, r.xiX.estimate, "seagreen");
    svg.rect(3.2, 0.0, 3.8, r.xiX.bound, "lightgray");
    svg.text(0.5, r.xiB.estimate, "xiB est");
    svg.text(1.5, r.xiB.bound, "xiB bound");
    svg.text(2.5, r.xiX.estimate, "xiX est");
    svg.text(3.5, r.xiX.bound, "xiX bound");
    svg.labels("quantity", "[E R^q]^(1/q)");
    return svg.str();
}

inline std::string grid_svg(const PhaseTransitionGrid& g) {
    const auto series = rate_by_total(g);
    double xMax = 1.0;
    for (const auto& [name, pts] : series)
        if (!pts.empty()) xMax = std::max(xMax, static_cast<double>(pts.rbegin()->first));
    Svg svg("recovery success rate vs nA + nB", 0.0, xMax, 0.0, 1.0);
    static const char* colors[] = {"steelblue", "crimson", "seagreen", "darkorange"};
    std::size_t k = 0;
    for (const auto& [name, pts] : series) {
        std::vector<std::pair<double, double>> line;
        for (const auto& [total, sc] : pts)
            line.emplace_back(static_cast<double>(total),
                              static_cast<double>(sc.first) / static_cast<double>(sc.second));
        const std::string color = colors[k % 4];
        svg.polyline(line, color);
        svg.text(xMax, 1.0 - 0.06 * static_cast<double>(k), name, color, "end");
        ++k;
    }
    svg.labels("nA + nB", "success rate");
    return svg.str();
}

}  // namespace rsparse::report
