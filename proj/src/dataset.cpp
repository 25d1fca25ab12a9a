#include "gkm/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "gkm/error.hpp"
#include "gkm/random.hpp"

namespace gkm {
namespace {

// Reorders `data` so that positions with visible[k] come first, preserving
// relative order inside both groups.
Dataset regroup(const Dataset& data, const std::vector<char>& visible) {
  Dataset out;
  const std::size_t n = data.size();
  out.points.reserve(n);
  out.truth.reserve(n);
  out.source_index.reserve(n);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < n; ++k) {
      if (static_cast<bool>(visible[k]) != (pass == 0)) continue;
      out.points.push_back(data.points[k]);
      out.truth.push_back(data.truth[k]);
      out.source_index.push_back(data.source_index[k]);
      if (pass == 0) out.labels.push_back(data.truth[k]);
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void Dataset::validate() const {
  if (labels.size() > points.size() || truth.size() != points.size() ||
      source_index.size() != points.size())
    throw Error(ErrorKind::InvalidArgument, "dataset arrays have inconsistent sizes");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != truth[i])
      throw Error(ErrorKind::InvalidArgument, "visible label disagrees with truth");
}

Dataset make_dataset(std::vector<SparseVector> points, std::span<const double> labels) {
  if (labels.size() != points.size())
    throw Error(ErrorKind::InvalidArgument, "one label per point required");
  Dataset raw;
  raw.points = std::move(points);
  raw.truth.assign(labels.begin(), labels.end());
  raw.source_index.resize(raw.points.size());
  std::iota(raw.source_index.begin(), raw.source_index.end(), std::size_t{0});
  std::vector<char> visible(raw.points.size());
  for (std::size_t k = 0; k < visible.size(); ++k) visible[k] = labels[k] != 0.0;
  return regroup(raw, visible);
}

Dataset revealed_unlabeled(const Dataset& data) {
  Dataset out;
  for (std::size_t k = data.labeled(); k < data.size(); ++k) {
    if (data.truth[k] == 0.0) continue;
    out.points.push_back(data.points[k]);
    out.labels.push_back(data.truth[k]);
    out.truth.push_back(data.truth[k]);
    out.source_index.push_back(data.source_index[k]);
  }
  return out;
}

Dataset read_libsvm(std::istream& in) {
  std::vector<SparseVector> points;
  std::vector<double> labels;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](ErrorKind kind, const std::string& what) {
    throw Error(kind, "line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty() || rest.front() == '#') continue;

    auto next_token = [&rest]() {
      rest = trim(rest);
      const auto end = rest.find_first_of(" \t");
      std::string_view token = rest.substr(0, end);
      rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
      return token;
    };

    double label = 0.0;
    const std::string_view label_token = next_token();
    if (!parse_number(label_token, label))
      fail(ErrorKind::ParseError, "bad label '" + std::string(label_token) + "'");
    if (label != 1.0 && label != -1.0 && label != 0.0)
      fail(ErrorKind::InvalidLabel, "label must be -1, 0 or +1, got " + std::string(label_token));

    std::vector<SparseEntry> entries;
    for (std::string_view token = next_token(); !token.empty(); token = next_token()) {
      if (token.front() == '#') break;
      const auto colon = token.find(':');
      std::uint32_t index = 0;
      double value = 0.0;
      if (colon == std::string_view::npos || !parse_number(token.substr(0, colon), index) ||
          !parse_number(token.substr(colon + 1), value))
        fail(ErrorKind::ParseError, "bad feature '" + std::string(token) + "'");
      if (index == 0) fail(ErrorKind::ParseError, "feature indices are 1-based");
      if (!entries.empty() && index <= entries.back().index)
        fail(ErrorKind::ParseError, "feature indices must be strictly increasing");
      entries.push_back({index, value});
    }
    points.emplace_back(std::move(entries));
    labels.push_back(label);
  }
  return make_dataset(std::move(points), labels);
}

Dataset load_libsvm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_libsvm(in);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  for (std::size_t k = 0; k < data.size(); ++k) {
    const double label = k < data.labeled() ? data.labels[k] : 0.0;
    out << (label > 0 ? "+" : "") << format_double(label);
    for (const auto& e : data.points[k].entries())
      out << ' ' << e.index << ':' << format_double(e.value);
    out << '\n';
  }
}

void save_libsvm(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_libsvm(out, data);
}

Dataset hide_labels(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0))
    throw Error(ErrorKind::InvalidArgument, "hide fraction must lie in [0, 1)");
  if (data.unlabeled() != 0)
    throw Error(ErrorKind::InvalidArgument, "hide_labels needs a fully labeled dataset");
  const std::size_t n = data.size();
  const auto hidden = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));

  // Partial Fisher-Yates: the first `hidden` slots form a uniform subset.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t k = 0; k < hidden; ++k) {
    const std::size_t pick = k + rng.uniform_index(n - k);
    std::swap(order[k], order[pick]);
  }
  std::vector<char> visible(n, 1);
  for (std::size_t k = 0; k < hidden; ++k) visible[order[k]] = 0;

  for (double cls : {1.0, -1.0}) {
    bool present = false;
    bool kept = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (data.truth[k] != cls) continue;
      present = true;
      kept = kept || visible[k];
    }
    if (present && !kept)
      throw Error(ErrorKind::DegenerateSplit,
                  "class " + format_double(cls) + " lost every visible label");
  }
  return regroup(data, visible);
}

Dataset apply_mask(const Dataset& data, std::span<const std::size_t> hidden) {
  std::vector<char> visible(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) visible[k] = k < data.labeled();
  std::vector<std::size_t> position_of(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (data.source_index[k] >= data.size())
      throw Error(ErrorKind::InvalidArgument, "dataset source indices are not a permutation");
    position_of[data.source_index[k]] = k;
  }
  for (std::size_t one_based : hidden) {
    if (one_based == 0 || one_based > data.size())
      throw Error(ErrorKind::InvalidArgument,
                  "mask index " + std::to_string(one_based) + " out of range");
    visible[position_of[one_based - 1]] = 0;
  }
  return regroup(data, visible);
}

std::vector<std::size_t> read_mask(std::istream& in) {
  std::vector<std::size_t> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view token = trim(line);
    if (token.empty() || token.front() == '#') continue;
    std::size_t index = 0;
    if (!parse_number(token, index))
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": bad index");
    out.push_back(index);
  }
  return out;
}

Dataset synth_two_gaussians(std::size_t n, std::size_t dim, double separation,
                            std::uint64_t seed) {
  if (n < 2 || dim < 1)
    throw Error(ErrorKind::InvalidArgument, "synth_two_gaussians needs n >= 2 and dim >= 1");
  Rng rng(seed);
  std::vector<SparseVector> points;
  std::vector<double> labels;
  points.reserve(n);
  labels.reserve(n);
  std::vector<double> x(dim);
  for (std::size_t k = 0; k < n; ++k) {
    const double y = k % 2 == 0 ? 1.0 : -1.0;
    for (double& v : x) v = rng.normal();
    x[0] += y * separation / 2.0;
    points.push_back(SparseVector::from_dense(x));
    labels.push_back(y);
  }
  return make_dataset(std::move(points), labels);
}

}  // namespace gkm
