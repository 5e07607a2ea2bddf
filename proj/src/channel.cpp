#include "semioscope/channel.hpp"

#include <cmath>
#include <unordered_set>

#include "semioscope/errors.hpp"
#include "semioscope/rng.hpp"

namespace semioscope {

namespace {

std::vector<std::string> numbered_ids(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(std::string(prefix) + std::to_string(i));
  }
  return out;
}

std::vector<double> descending_scores(std::size_t n) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = -static_cast<double>(i);
  return s;
}

} // namespace

ChannelMatrix::ChannelMatrix(std::vector<double> cells, std::size_t rows,
                             std::size_t cols)
    : cells_(std::move(cells)), rows_(rows), cols_(cols) {
  if (rows_ == 0 || cols_ == 0 || cells_.size() != rows_ * cols_) {
    throw ShapeError("channel matrix shape mismatch: " +
                     std::to_string(cells_.size()) + " cells for " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  for (std::size_t m = 0; m < rows_; ++m) {
    // Validate and renormalize each row through ProbVector.
    std::vector<double> row(cells_.begin() + m * cols_,
                            cells_.begin() + (m + 1) * cols_);
    ProbVector p(std::move(row));
    for (std::size_t i = 0; i < cols_; ++i) cells_[m * cols_ + i] = p[i];
  }
}

SemioticChannel::SemioticChannel(std::string audience, std::string context,
                                 ChannelMatrix m,
                                 std::vector<std::string> interp_ids)
    : audience_id(std::move(audience)),
      context_id(std::move(context)),
      matrix(std::move(m)),
      interpretation_ids(std::move(interp_ids)) {
  if (interpretation_ids.size() != matrix.cols()) {
    throw ShapeError("channel has " + std::to_string(matrix.cols()) +
                     " columns but " +
                     std::to_string(interpretation_ids.size()) +
                     " interpretation ids");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : interpretation_ids) {
    if (!seen.insert(id).second) {
      throw ValidationError("duplicate interpretation id '" + id + "'");
    }
  }
}

Scenario::Scenario(SourceFamily src, SemioticChannel ch)
    : source(std::move(src)), channel(std::move(ch)) {
  if (source.size() != channel.matrix.rows()) {
    throw ShapeError("scenario source has " + std::to_string(source.size()) +
                     " messages but the channel has " +
                     std::to_string(channel.matrix.rows()) + " rows");
  }
}

JointDist joint_distribution(const ProbVector& source,
                             const SemioticChannel& ch) {
  if (source.alphabet_size() != ch.matrix.rows()) {
    throw ShapeError("source alphabet " +
                     std::to_string(source.alphabet_size()) +
                     " does not match channel rows " +
                     std::to_string(ch.matrix.rows()));
  }
  const std::size_t rows = ch.matrix.rows();
  const std::size_t cols = ch.matrix.cols();
  std::vector<double> cells(rows * cols);
  for (std::size_t m = 0; m < rows; ++m) {
    for (std::size_t i = 0; i < cols; ++i) {
      cells[m * cols + i] = source[m] * ch.matrix.at(m, i);
    }
  }
  return JointDist(std::move(cells), rows, cols);
}

Bits decipherability(const SourceFamily& f, Lambda lambda,
                     const SemioticChannel& ch) {
  return mutual_information(joint_distribution(message_distribution(f, lambda), ch));
}

Bits residual_ambiguity(const SourceFamily& f, Lambda lambda,
                        const SemioticChannel& ch) {
  return conditional_entropy(joint_distribution(message_distribution(f, lambda), ch));
}

std::vector<InteractionRecord> sample_interactions(const SourceFamily& f,
                                                   Lambda lambda,
                                                   const SemioticChannel& ch,
                                                   std::size_t n,
                                                   std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_interactions needs n >= 1");
  if (f.size() != ch.matrix.rows()) {
    throw ShapeError("family has " + std::to_string(f.size()) +
                     " messages but the channel has " +
                     std::to_string(ch.matrix.rows()) + " rows");
  }
  const ProbVector source = message_distribution(f, lambda);
  const std::vector<double> source_cdf = cumulative(source.span());
  std::vector<std::vector<double>> row_cdfs(ch.matrix.rows());
  for (std::size_t m = 0; m < ch.matrix.rows(); ++m) {
    row_cdfs[m] = cumulative(ch.matrix.row(m));
  }

  std::mt19937_64 rng(seed);
  std::vector<InteractionRecord> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = draw_categorical(source_cdf, rng);
    const std::size_t i = draw_categorical(row_cdfs[m], rng);
    out.push_back({ch.audience_id, ch.context_id, lambda.value,
                   f.message_ids[m], ch.interpretation_ids[i]});
  }
  return out;
}

namespace {

Scenario make_identity(std::size_t n) {
  std::vector<double> cells(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) cells[i * n + i] = 1.0;
  return Scenario(
      SourceFamily(numbered_ids("m", n), descending_scores(n)),
      SemioticChannel("identity", "noiseless", ChannelMatrix(std::move(cells), n, n),
                      numbered_ids("i", n)));
}

Scenario make_constant(std::size_t n) {
  std::vector<double> cells(n * n, 1.0 / static_cast<double>(n));
  return Scenario(
      SourceFamily(numbered_ids("m", n), descending_scores(n)),
      SemioticChannel("constant", "uninformative",
                      ChannelMatrix(std::move(cells), n, n),
                      numbered_ids("i", n)));
}

Scenario make_bsc(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("bsc crossover probability " + std::to_string(p) +
                      " outside [0, 1]");
  }
  std::vector<double> cells = {1.0 - p, p, p, 1.0 - p};
  // Equal scores keep the source uniform at every temperature, so sampled
  // fixtures match the closed-form 1 - h(p) mutual information.
  return Scenario(
      SourceFamily(numbered_ids("m", 2), {0.0, 0.0}),
      SemioticChannel("bsc", "crossover_" + std::to_string(p),
                      ChannelMatrix(std::move(cells), 2, 2),
                      numbered_ids("i", 2)));
}

Scenario make_random(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> scores(k);
  for (std::size_t i = 0; i < k; ++i) scores[i] = -2.0 + 4.0 * unit_double(rng);
  std::vector<double> cells(k * k);
  for (std::size_t m = 0; m < k; ++m) {
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      // Exponential spacings give a Dirichlet(1) row.
      const double e = -std::log(1.0 - unit_double(rng));
      cells[m * k + i] = e;
      total += e;
    }
    for (std::size_t i = 0; i < k; ++i) cells[m * k + i] /= total;
  }
  return Scenario(
      SourceFamily(numbered_ids("m", k), std::move(scores)),
      SemioticChannel("random", "seed_" + std::to_string(seed),
                      ChannelMatrix(std::move(cells), k, k),
                      numbered_ids("i", k)));
}

// Clear messages map one-to-one onto interpretations; noisy messages spread
// near-uniformly over all of them. Scores decay so low temperatures speak
// only through the clear block: decipherability rises while mass spreads
// over the clear messages and falls once the noisy tail lights up.
Scenario make_tiered(std::size_t n_clear, std::size_t n_noisy,
                     std::uint64_t seed) {
  if (n_clear < 1 || n_noisy < 1) {
    throw DomainError("tiered scenario needs n_clear >= 1 and n_noisy >= 1");
  }
  const std::size_t n = n_clear + n_noisy;
  std::vector<std::string> ids;
  std::vector<double> scores;
  ids.reserve(n);
  scores.reserve(n);
  for (std::size_t i = 0; i < n_clear; ++i) {
    ids.push_back("clear_" + std::to_string(i));
    scores.push_back(-0.5 * static_cast<double>(i));
  }
  for (std::size_t j = 0; j < n_noisy; ++j) {
    ids.push_back("noisy_" + std::to_string(j));
    scores.push_back(-3.0 - 0.5 * static_cast<double>(j));
  }

  std::mt19937_64 rng(seed);
  std::vector<double> cells(n * n_clear, 0.0);
  for (std::size_t i = 0; i < n_clear; ++i) cells[i * n_clear + i] = 1.0;
  for (std::size_t j = 0; j < n_noisy; ++j) {
    const std::size_t row = n_clear + j;
    double total = 0.0;
    for (std::size_t i = 0; i < n_clear; ++i) {
      const double w = 1.0 + 0.1 * (2.0 * unit_double(rng) - 1.0);
      cells[row * n_clear + i] = w;
      total += w;
    }
    for (std::size_t i = 0; i < n_clear; ++i) cells[row * n_clear + i] /= total;
  }
  return Scenario(
      SourceFamily(std::move(ids), std::move(scores)),
      SemioticChannel("tiered", "confusability",
                      ChannelMatrix(std::move(cells), n, n_clear),
                      numbered_ids("i", n_clear)));
}

} // namespace

Scenario reference_scenario(const ScenarioSpec& spec) {
  switch (spec.kind) {
    case ScenarioSpec::Kind::identity:
      if (spec.size < 1) throw DomainError("identity scenario needs size >= 1");
      return make_identity(spec.size);
    case ScenarioSpec::Kind::constant:
      if (spec.size < 1) throw DomainError("constant scenario needs size >= 1");
      return make_constant(spec.size);
    case ScenarioSpec::Kind::bsc:
      return make_bsc(spec.crossover);
    case ScenarioSpec::Kind::random:
      if (spec.size < 1) throw DomainError("random scenario needs size >= 1");
      return make_random(spec.size, spec.seed);
    case ScenarioSpec::Kind::tiered_confusability:
      return make_tiered(spec.n_clear, spec.n_noisy, spec.seed);
  }
  throw DomainError("unknown scenario kind");
}

namespace {

constexpr std::uint64_t kTieredDefaultSeed = 42;

// Parses "name(a,b,c)" into name and numeric arguments.
bool parse_call(std::string_view text, std::string& name,
                std::vector<double>& args) {
  const auto open = text.find('(');
  if (open == std::string_view::npos) return false;
  if (text.back() != ')') return false;
  name = std::string(text.substr(0, open));
  std::string body(text.substr(open + 1, text.size() - open - 2));
  std::size_t pos = 0;
  while (pos <= body.size() && !body.empty()) {
    const auto comma = body.find(',', pos);
    const std::string tok =
        body.substr(pos, comma == std::string::npos ? std::string::npos
                                                    : comma - pos);
    try {
      std::size_t used = 0;
      args.push_back(std::stod(tok, &used));
      if (used != tok.size()) return false;
    } catch (const std::exception&) {
      return false;
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return true;
}

} // namespace

Scenario builtin_scenario(std::string_view name) {
  if (name == "identity4") return make_identity(4);
  if (name == "constant4") return make_constant(4);
  if (name == "bsc011") return make_bsc(0.11);
  if (name == "bsc025") return make_bsc(0.25);
  if (name == "tiered_default") return make_tiered(4, 12, kTieredDefaultSeed);

  std::string kind;
  std::vector<double> args;
  if (parse_call(name, kind, args)) {
    if (kind == "identity" && args.size() == 1) {
      return make_identity(static_cast<std::size_t>(args[0]));
    }
    if (kind == "constant" && args.size() == 1) {
      return make_constant(static_cast<std::size_t>(args[0]));
    }
    if (kind == "bsc" && args.size() == 1) {
      return make_bsc(args[0]);
    }
    if (kind == "random" && (args.size() == 1 || args.size() == 2)) {
      const std::uint64_t seed =
          args.size() == 2 ? static_cast<std::uint64_t>(args[1]) : 0;
      return make_random(static_cast<std::size_t>(args[0]), seed);
    }
    if (kind == "tiered" && (args.size() == 2 || args.size() == 3)) {
      const std::uint64_t seed = args.size() == 3
                                     ? static_cast<std::uint64_t>(args[2])
                                     : kTieredDefaultSeed;
      return make_tiered(static_cast<std::size_t>(args[0]),
                         static_cast<std::size_t>(args[1]), seed);
    }
  }
  throw DomainError("unknown builtin scenario '" + std::string(name) +
                    "'; known names: identity4, constant4, bsc011, bsc025, "
                    "tiered_default, identity(n), constant(n), bsc(p), "
                    "random(k[,seed]), tiered(n_clear,n_noisy[,seed])");
}

} // namespace semioscope
