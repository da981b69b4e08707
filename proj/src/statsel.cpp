#include "acclink/statsel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "acclink/csv.hpp"
#include "acclink/error.hpp"
#include "acclink/parallel.hpp"

namespace acclink::statsel {

std::vector<EcdfPoint> ecdf(std::vector<double> samples) {
  if (samples.empty()) throw data_error("ecdf of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  std::vector<EcdfPoint> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    out.push_back({samples[i], static_cast<double>(i + 1) / n});
  }
  out.back().f = 1.0;
  return out;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Small-lambda form of the CDF converges fast where the alternating series does not.
    const double pi = std::numbers::pi;
    const double y = std::exp(-pi * pi / (8.0 * lambda * lambda));
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double e = static_cast<double>((2 * k - 1) * (2 * k - 1));
      s += std::pow(y, e);
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw data_error("KS test needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double ne = n * m / (n + m);
  return {d, kolmogorov_q(std::sqrt(ne) * d)};
}

namespace {

void require_shape(const ClassSamples& data) {
  if (data.values.size() != data.names.size()) throw data_error("feature names and columns differ in count");
  for (const auto& col : data.values) {
    if (col.size() != data.labels.size()) throw data_error("feature column length differs from label count");
  }
}

}  // namespace

KsFilterResult ks_filter(const ClassSamples& data, double alpha, std::size_t jobs) {
  require_shape(data);
  const auto pos = std::count(data.labels.begin(), data.labels.end(), 1);
  if (pos == 0 || static_cast<std::size_t>(pos) == data.labels.size()) {
    throw data_error("KS filtering needs both linked and non-linked instances");
  }
  std::vector<KsRow> rows(data.names.size());
  parallel_for(data.names.size(), jobs, [&](std::size_t f) {
    std::vector<double> linked, nonlinked;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      (data.labels[i] == 1 ? linked : nonlinked).push_back(data.values[f][i]);
    }
    rows[f].feature = data.names[f];
    rows[f].result = ks_two_sample(std::move(linked), std::move(nonlinked));
    rows[f].kept = rows[f].result.p_value < alpha || alpha >= 1.0;
  });
  KsFilterResult out;
  for (const auto& r : rows) (r.kept ? out.kept : out.dropped).push_back(r.feature);
  out.report = std::move(rows);
  return out;
}

double class_entropy(const std::vector<int>& labels) {
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  const double n = static_cast<double>(labels.size());
  double h = 0.0;
  for (const auto& [l, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

std::vector<std::size_t> equal_frequency_bins(const std::vector<double>& values, std::size_t bins) {
  if (bins == 0) throw usage_error("bin count must be >= 1");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  // Cut k falls at the first value change at or after position n*k/bins.
  std::vector<double> uppers;
  std::size_t bin = 1;
  for (std::size_t i = 1; i < n && bin < bins; ++i) {
    if (i * bins >= bin * n && sorted[i] != sorted[i - 1]) {
      uppers.push_back(sorted[i - 1]);
      while (bin < bins && i * bins >= bin * n) ++bin;
    }
  }
  std::vector<std::size_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = static_cast<std::size_t>(std::lower_bound(uppers.begin(), uppers.end(), values[i]) - uppers.begin());
  }
  return out;
}

double information_gain(const std::vector<double>& feature, const std::vector<int>& labels, std::size_t bins) {
  if (feature.size() != labels.size()) throw data_error("feature and label lengths differ");
  if (labels.empty()) return 0.0;
  const double h = class_entropy(labels);
  if (h == 0.0) return 0.0;
  const auto b = equal_frequency_bins(feature, bins);
  std::map<std::size_t, std::vector<int>> groups;
  for (std::size_t i = 0; i < b.size(); ++i) groups[b[i]].push_back(labels[i]);
  double cond = 0.0;
  for (const auto& [k, group] : groups) {
    cond += static_cast<double>(group.size()) / static_cast<double>(labels.size()) * class_entropy(group);
  }
  return std::max(0.0, h - cond);
}

std::vector<IgRow> info_gain_rank(const ClassSamples& data, std::size_t bins) {
  require_shape(data);
  std::vector<IgRow> rows;
  double total = 0.0;
  for (std::size_t f = 0; f < data.names.size(); ++f) {
    const double ig = information_gain(data.values[f], data.labels, bins);
    rows.push_back({data.names[f], ig, 0.0});
    total += ig;
  }
  for (auto& r : rows) r.share = total > 0.0 ? 100.0 * r.ig / total : 0.0;
  std::sort(rows.begin(), rows.end(), [](const IgRow& a, const IgRow& b) {
    if (a.ig != b.ig) return a.ig > b.ig;
    return a.feature < b.feature;
  });
  return rows;
}

void write_ks_report(const std::vector<KsRow>& rows, double alpha, std::ostream& out,
                     const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "feature,D,p_value,alpha,kept\n";
  for (const auto& r : rows) {
    out << csv::join({r.feature, csv::format_double(r.result.d), csv::format_double(r.result.p_value),
                      csv::format_double(alpha), r.kept ? "true" : "false"})
        << '\n';
  }
}

void write_ecdf_csv(const ClassSamples& data, std::ostream& out, const std::string& header_comment) {
  require_shape(data);
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "feature,class,x,F\n";
  for (std::size_t f = 0; f < data.names.size(); ++f) {
    for (int cls : {1, 0}) {
      std::vector<double> s;
      for (std::size_t i = 0; i < data.labels.size(); ++i) {
        if (data.labels[i] == cls) s.push_back(data.values[f][i]);
      }
      if (s.empty()) continue;
      for (const auto& p : ecdf(std::move(s))) {
        out << csv::join({data.names[f], cls == 1 ? "Linked" : "NonLinked", csv::format_double(p.x),
                          csv::format_double(p.f)})
            << '\n';
      }
    }
  }
}

void write_ig_report(const std::vector<IgRow>& rows, std::ostream& out, const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "rank,feature,information_gain,share_percent\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << csv::join({std::to_string(i + 1), rows[i].feature, csv::format_double(rows[i].ig),
                      csv::format_double(rows[i].share)})
        << '\n';
  }
}

}  // namespace acclink::statsel
