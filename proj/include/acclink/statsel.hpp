#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace acclink::statsel {

struct EcdfPoint {
  double x = 0.0;
  double f = 0.0;  // fraction of samples <= x

  bool operator==(const EcdfPoint&) const = default;
};

/// Right-continuous step function: one point per distinct value, ascending.
std::vector<EcdfPoint> ecdf(std::vector<double> samples);

struct KsResult {
  double d = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// Exact D over the merged sample; asymptotic p with n*m/(n+m) effective size.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Values of each feature split by class.
struct ClassSamples {
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // [feature][instance]
  std::vector<int> labels;                  // 1 linked, 0 non-linked
};

struct KsRow {
  std::string feature;
  KsResult result;
  bool kept = false;
};

struct KsFilterResult {
  std::vector<std::string> kept;
  std::vector<std::string> dropped;
  std::vector<KsRow> report;  // input feature order
};

inline constexpr double kDefaultAlpha = 0.01;

/// Keeps features whose linked and non-linked distributions differ at p < alpha.
KsFilterResult ks_filter(const ClassSamples& data, double alpha = kDefaultAlpha, std::size_t jobs = 1);

struct IgRow {
  std::string feature;
  double ig = 0.0;     // bits
  double share = 0.0;  // percent of summed IG
};

/// Shannon entropy in bits of a label vector.
double class_entropy(const std::vector<int>& labels);

/// Bin index per value: equal-frequency cut points, tied values share a bin.
std::vector<std::size_t> equal_frequency_bins(const std::vector<double>& values, std::size_t bins);

double information_gain(const std::vector<double>& feature, const std::vector<int>& labels, std::size_t bins);

/// Features ranked by decreasing IG; ties by feature name.
std::vector<IgRow> info_gain_rank(const ClassSamples& data, std::size_t bins = 10);

void write_ks_report(const std::vector<KsRow>& rows, double alpha, std::ostream& out,
                     const std::string& header_comment = "");
/// Long format: feature, class, x, F.
void write_ecdf_csv(const ClassSamples& data, std::ostream& out, const std::string& header_comment = "");
void write_ig_report(const std::vector<IgRow>& rows, std::ostream& out, const std::string& header_comment = "");

}  // namespace acclink::statsel
