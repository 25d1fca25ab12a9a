#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gkm/error.hpp"
#include "gkm/optimizer.hpp"
#include "gkm/random.hpp"

namespace gkm {
namespace {

constexpr const char* kMagic = "gkm-model";
constexpr int kFormatVersion = 1;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line whose first word is `key`; returns the remainder as a stream.
  std::istringstream expect(const std::string& key) {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file, wanted '" + key + "'");
    ++line_no_;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    if (word != key) fail("expected '" + key + "', found '" + word + "'");
    return fields;
  }

  std::string next_line() {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file in support vectors");
    ++line_no_;
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ParseError, "model line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

template <typename T>
T read_one(LineReader& reader, const std::string& key) {
  auto fields = reader.expect(key);
  T value{};
  if (!(fields >> value)) reader.fail("bad value for '" + key + "'");
  return value;
}

}  // namespace

void save_model(std::ostream& out, const ModelState& model) {
  const auto avg = model.averaged.folded();
  const auto cur = model.current.folded();
  std::size_t support = 0;
  for (std::size_t k = 0; k < avg.size(); ++k) support += (avg[k] != 0.0 || cur[k] != 0.0);

  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "rng " << Rng::kAlgorithm << '\n';
  out << "kernel se " << num(model.kernel.sigma_f()) << ' ' << num(model.kernel.sigma_l()) << '\n';
  out << "loss " << loss_token(model.config.loss) << ' ' << num(loss_parameter(model.config.loss))
      << '\n';
  out << "p " << num(model.config.smoothness.p) << '\n';
  out << "C " << num(model.config.C) << '\n';
  out << "C_prime " << num(model.config.C_prime) << '\n';
  out << "iterations " << model.iterations << '\n';
  out << "seed " << model.config.seed << '\n';
  out << "sigma_s " << num(model.sigma_s) << '\n';
  out << "averaging "
      << (model.config.averaging == AveragingRule::PreUpdate ? "pre-update" : "post-update")
      << '\n';
  out << "support " << support << '\n';
  for (std::size_t k = 0; k < avg.size(); ++k) {
    if (avg[k] == 0.0 && cur[k] == 0.0) continue;
    out << num(avg[k]) << ' ' << num(cur[k]);
    for (const auto& e : model.points[k].entries()) out << ' ' << e.index << ':' << num(e.value);
    out << '\n';
  }
}

ModelState load_model(std::istream& in) {
  LineReader reader(in);
  ModelState model;
  if (read_one<int>(reader, kMagic) != kFormatVersion) reader.fail("unsupported format version");
  (void)reader.expect("rng");
  {
    auto fields = reader.expect("kernel");
    std::string family;
    double sigma_f = 0;
    double sigma_l = 0;
    if (!(fields >> family >> sigma_f >> sigma_l) || family != "se") reader.fail("bad kernel line");
    model.kernel = KernelSpec(sigma_f, sigma_l);
  }
  {
    auto fields = reader.expect("loss");
    std::string token;
    double parameter = 0;
    if (!(fields >> token >> parameter)) reader.fail("bad loss line");
    model.config.loss = parse_loss(token, parameter);
  }
  model.config.smoothness.p = read_one<double>(reader, "p");
  model.config.C = read_one<double>(reader, "C");
  model.config.C_prime = read_one<double>(reader, "C_prime");
  model.iterations = read_one<std::uint64_t>(reader, "iterations");
  model.config.iterations = model.iterations;
  model.config.seed = read_one<std::uint64_t>(reader, "seed");
  model.sigma_s = read_one<double>(reader, "sigma_s");
  {
    const auto rule = read_one<std::string>(reader, "averaging");
    if (rule == "pre-update") model.config.averaging = AveragingRule::PreUpdate;
    else if (rule == "post-update") model.config.averaging = AveragingRule::PostUpdate;
    else reader.fail("unknown averaging rule '" + rule + "'");
  }
  const auto support = read_one<std::size_t>(reader, "support");
  model.points.reserve(support);
  model.averaged.coef.reserve(support);
  model.current.coef.reserve(support);
  for (std::size_t k = 0; k < support; ++k) {
    std::istringstream fields(reader.next_line());
    double avg = 0;
    double cur = 0;
    if (!(fields >> avg >> cur)) reader.fail("bad coefficient pair");
    std::vector<SparseEntry> entries;
    std::string token;
    while (fields >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) reader.fail("bad feature '" + token + "'");
      try {
        entries.push_back({static_cast<std::uint32_t>(std::stoul(token.substr(0, colon))),
                           std::stod(token.substr(colon + 1))});
      } catch (const std::exception&) {
        reader.fail("bad feature '" + token + "'");
      }
    }
    model.points.emplace_back(std::move(entries));
    model.averaged.coef.push_back(avg);
    model.current.coef.push_back(cur);
  }
  return model;
}

}  // namespace gkm
