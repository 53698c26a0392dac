#include "dccopmsp/dynamics.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "text_util.hpp"

namespace dccopmsp {

void DynamicConfig::validate() const {
  if (num_changes < 0) throw std::invalid_argument("number of changes must be >= 0");
  if (!(magnitude >= 0.0 && magnitude < 1.0)) {
    throw std::invalid_argument("change magnitude must lie in [0,1)");
  }
  if (budget < 0) throw std::invalid_argument("evaluation budget must be >= 0");
  if (num_changes > 0 && change_interval() < 1) {
    throw std::invalid_argument("budget too small for the number of changes");
  }
}

DynamicEnvironment::DynamicEnvironment(ResourceMatrix baseline, DynamicConfig cfg)
    : baseline_(std::move(baseline)), current_(baseline_), cfg_(cfg), rng_(cfg.seed) {
  cfg_.validate();
  history_.push_back(current_);
}

const ChangeEvent& DynamicEnvironment::next_change(long eval_count) {
  if (epoch_ >= cfg_.num_changes) {
    throw std::logic_error("all " + std::to_string(cfg_.num_changes) + " changes already applied");
  }
  const Period periods = baseline_.periods();
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> gamma(1.0 - cfg_.magnitude, 1.0 + cfg_.magnitude);

  std::vector<Period> chosen;
  while (chosen.empty()) {
    for (Period t = 1; t <= periods; ++t) {
      if (coin(rng_)) chosen.push_back(t);
    }
  }
  ChangeEvent ev;
  ev.index = epoch_ + 1;
  ev.eval_count_at_change = eval_count;
  for (Period t : chosen) {
    // eta == 0 gives the degenerate interval [1,1).
    const double g = cfg_.magnitude > 0.0 ? gamma(rng_) : 1.0;
    ev.factors[t] = g;
    for (int r = 0; r < baseline_.resources(); ++r) current_(r, t) = baseline_(r, t) * g;
  }
  ++epoch_;
  log_.push_back(std::move(ev));
  history_.push_back(current_);
  return log_.back();
}

ResourceMatrix replay(const ResourceMatrix& baseline, const std::vector<ChangeEvent>& log) {
  ResourceMatrix m = baseline;
  for (const ChangeEvent& ev : log) {
    for (const auto& [t, g] : ev.factors) {
      for (int r = 0; r < baseline.resources(); ++r) m(r, t) = baseline(r, t) * g;
    }
  }
  return m;
}

std::vector<TracePoint> capacity_trace(const DynamicEnvironment& env) {
  std::vector<TracePoint> out;
  const auto& hist = env.history();
  const auto& base = env.baseline();
  for (int r = 0; r < base.resources(); ++r) {
    for (Period t = 1; t <= base.periods(); ++t) {
      for (std::size_t e = 0; e < hist.size(); ++e) {
        out.push_back({r, t, static_cast<int>(e), hist[e](r, t), base(r, t)});
      }
    }
  }
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace,
                     const std::vector<std::string>& resource_names) {
  out << "resource,period,epoch,capacity,baseline\n";
  for (const auto& p : trace) {
    out << resource_names.at(static_cast<std::size_t>(p.resource)) << ',' << p.period << ','
        << p.epoch << ',' << format_double(p.capacity) << ',' << format_double(p.baseline) << "\n";
  }
}

void write_trace_svg(std::ostream& out, const std::vector<TracePoint>& trace,
                     const std::vector<std::string>& resource_names) {
  if (trace.empty()) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"10\" height=\"10\"/>\n";
    return;
  }
  Period periods = 0;
  int epochs = 0;
  double ymax = 0.0;
  for (const auto& p : trace) {
    periods = std::max(periods, p.period);
    epochs = std::max(epochs, p.epoch + 1);
    ymax = std::max({ymax, p.capacity, p.baseline});
  }
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.1;
  const int cols = std::min(3, periods);
  const int rows = (periods + cols - 1) / cols;
  const double pw = 300, ph = 200, margin = 40;
  const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * (pw + margin) + margin
      << "\" height=\"" << rows * (ph + margin) + margin << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (Period t = 1; t <= periods; ++t) {
    const int c = (t - 1) % cols;
    const int r = (t - 1) / cols;
    const double x0 = margin + c * (pw + margin);
    const double y0 = margin + r * (ph + margin);
    out << "<g>\n<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#999\"/>\n";
    out << "<text x=\"" << x0 + 4 << "\" y=\"" << y0 - 6 << "\">Period " << t << "</text>\n";
    auto sx = [&](int e) { return x0 + (epochs > 1 ? pw * e / (epochs - 1) : 0.0); };
    auto sy = [&](double v) { return y0 + ph - ph * v / ymax; };
    for (std::size_t res = 0; res < resource_names.size(); ++res) {
      const char* color = colors[res % 5];
      std::string pts;
      double base = 0.0;
      for (const auto& p : trace) {
        if (p.period != t || p.resource != static_cast<int>(res)) continue;
        pts += format_double(sx(p.epoch)) + "," + format_double(sy(p.capacity)) + " ";
        base = p.baseline;
      }
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
          << pts << "\"/>\n";
      out << "<line x1=\"" << x0 << "\" x2=\"" << x0 + pw << "\" y1=\"" << sy(base) << "\" y2=\""
          << sy(base) << "\" stroke=\"" << color << "\" stroke-dasharray=\"5,4\"/>\n";
      if (t == 1) {
        out << "<text x=\"" << x0 + 8 << "\" y=\"" << y0 + 14 + 13 * static_cast<double>(res)
            << "\" fill=\"" << color << "\">" << resource_names[res] << "</text>\n";
      }
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

}  // namespace dccopmsp
