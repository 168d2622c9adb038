#include "assort/fnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "assort/error.hpp"
#include "assort/random.hpp"
#include "assort/serialize.hpp"

namespace assort {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_batch(const FnnModel& model, const Dataset& batch) {
  if (batch.size() == 0) throw UsageError("empty batch");
  if (static_cast<std::size_t>(batch.features.cols()) != model.input_dim())
    throw UsageError("encoding length " + std::to_string(batch.features.cols()) + " does not match model input " +
                     std::to_string(model.input_dim()));
  if (batch.features.rows() != batch.labels.size()) throw UsageError("features and labels differ in length");
}

// Parameter visitor in a fixed order: W1 (column-major), b1, w2, b2.
template <typename Fn>
void for_each_parameter(FnnModel& m, Fn fn) {
  for (Eigen::Index i = 0; i < m.w1.size(); ++i) fn(m.w1.data()[i]);
  for (Eigen::Index i = 0; i < m.b1.size(); ++i) fn(m.b1[i]);
  for (Eigen::Index i = 0; i < m.w2.size(); ++i) fn(m.w2[i]);
  fn(m.b2);
}

Dataset rows(const Dataset& data, std::span<const std::size_t> idx) {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(idx.size()), data.features.cols());
  out.labels.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) = data.features.row(static_cast<Eigen::Index>(idx[r]));
    out.labels[static_cast<Eigen::Index>(r)] = data.labels[static_cast<Eigen::Index>(idx[r])];
  }
  return out;
}

}  // namespace

bool FnnModel::operator==(const FnnModel& other) const {
  return w1.rows() == other.w1.rows() && w1.cols() == other.w1.cols() && w1 == other.w1 && b1 == other.b1 &&
         w2 == other.w2 && b2 == other.b2;
}

FnnModel init_fnn(std::uint64_t seed, std::size_t input_dim, std::size_t hidden) {
  if (input_dim == 0 || hidden == 0) throw UsageError("init_fnn needs positive dimensions");
  Rng rng(seed);
  FnnModel m;
  const auto in = static_cast<Eigen::Index>(input_dim);
  const auto h = static_cast<Eigen::Index>(hidden);
  m.w1.resize(h, in);
  m.b1 = Eigen::VectorXd::Zero(h);
  m.w2.resize(h);
  const double limit1 = std::sqrt(6.0 / static_cast<double>(input_dim + hidden));
  const double limit2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < in; ++c) m.w1(r, c) = rng.uniform(-limit1, limit1);
  for (Eigen::Index r = 0; r < h; ++r) m.w2[r] = rng.uniform(-limit2, limit2);
  m.b2 = 0.0;
  return m;
}

double forward(const FnnModel& model, std::span<const double> encoding) {
  if (encoding.size() != model.input_dim())
    throw UsageError("encoding length " + std::to_string(encoding.size()) + " does not match model input " +
                     std::to_string(model.input_dim()));
  const Eigen::Map<const Eigen::VectorXd> x(encoding.data(), static_cast<Eigen::Index>(encoding.size()));
  const Eigen::VectorXd hidden = (model.w1 * x + model.b1).cwiseMax(0.0);
  return sigmoid(model.w2.dot(hidden) + model.b2);
}

Eigen::VectorXd forward(const FnnModel& model, const Eigen::MatrixXd& batch) {
  if (static_cast<std::size_t>(batch.cols()) != model.input_dim())
    throw UsageError("encoding length " + std::to_string(batch.cols()) + " does not match model input " +
                     std::to_string(model.input_dim()));
  const Eigen::MatrixXd hidden = ((batch * model.w1.transpose()).rowwise() + model.b1.transpose()).cwiseMax(0.0);
  Eigen::VectorXd z = hidden * model.w2;
  return z.unaryExpr([&](double v) { return sigmoid(v + model.b2); });
}

double loss(const FnnModel& model, const Dataset& batch, double positive_weight) {
  check_batch(model, batch);
  const Eigen::VectorXd lambda = forward(model, batch.features);
  double total = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double p = std::clamp(lambda[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    const double y = batch.labels[i];
    total -= positive_weight * y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
  }
  return total / static_cast<double>(lambda.size());
}

FnnModel gradient(const FnnModel& model, const Dataset& batch, double positive_weight) {
  check_batch(model, batch);
  const double n = static_cast<double>(batch.size());
  const Eigen::MatrixXd pre = (batch.features * model.w1.transpose()).rowwise() + model.b1.transpose();
  const Eigen::MatrixXd hidden = pre.cwiseMax(0.0);
  const Eigen::VectorXd z = (hidden * model.w2).array() + model.b2;

  // d loss / d z for each example; zero where the clamp is active.
  Eigen::VectorXd g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double lambda = sigmoid(z[i]);
    const double y = batch.labels[i];
    const bool clamped = lambda < kProbabilityClamp || lambda > 1.0 - kProbabilityClamp;
    g[i] = clamped ? 0.0 : (-positive_weight * y * (1.0 - lambda) + (1.0 - y) * lambda) / n;
  }

  FnnModel grad;
  grad.w2 = hidden.transpose() * g;
  grad.b2 = g.sum();
  const Eigen::MatrixXd d_hidden =
      (g * model.w2.transpose()).cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
  grad.w1 = d_hidden.transpose() * batch.features;
  grad.b1 = d_hidden.colwise().sum().transpose();
  return grad;
}

FnnTrainResult train_with_history(const FnnModel& initial, const Dataset& data, const TrainConfig& config) {
  if (data.size() == 0) throw DataError("training set is empty");
  const bool has_pos = (data.labels.array() > 0.5).any();
  const bool has_neg = (data.labels.array() <= 0.5).any();
  if (!has_pos || !has_neg) throw DataError("training set needs both summative and non-summative sentences");
  if (!(config.learning_rate > 0) || config.batch_size == 0) throw UsageError("invalid training configuration");
  if (static_cast<std::size_t>(data.features.cols()) != initial.input_dim())
    throw UsageError("training encodings do not match the model input dimension");

  FnnTrainResult result{initial, {}};
  FnnModel& model = result.model;
  FnnModel m1{Eigen::MatrixXd::Zero(model.w1.rows(), model.w1.cols()), Eigen::VectorXd::Zero(model.b1.size()),
              Eigen::VectorXd::Zero(model.w2.size()), 0.0};
  FnnModel m2 = m1;

  Rng rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      const Dataset batch = rows(data, std::span<const std::size_t>(order).subspan(start, len));
      const FnnModel g = gradient(model, batch, config.positive_weight);
      ++step;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      auto adam = [&](auto& param, const auto& grad, auto& mom1, auto& mom2) {
        mom1 = config.beta1 * mom1 + (1.0 - config.beta1) * grad;
        mom2 = config.beta2 * mom2 + (1.0 - config.beta2) * grad * grad;
        param -= config.learning_rate * (mom1 / c1) / (std::sqrt(mom2 / c2) + config.epsilon);
      };
      m1.w1 = config.beta1 * m1.w1 + (1.0 - config.beta1) * g.w1;
      m2.w1 = config.beta2 * m2.w1 + (1.0 - config.beta2) * g.w1.cwiseAbs2();
      model.w1.array() -= config.learning_rate * (m1.w1.array() / c1) / ((m2.w1.array() / c2).sqrt() + config.epsilon);
      m1.b1 = config.beta1 * m1.b1 + (1.0 - config.beta1) * g.b1;
      m2.b1 = config.beta2 * m2.b1 + (1.0 - config.beta2) * g.b1.cwiseAbs2();
      model.b1.array() -= config.learning_rate * (m1.b1.array() / c1) / ((m2.b1.array() / c2).sqrt() + config.epsilon);
      m1.w2 = config.beta1 * m1.w2 + (1.0 - config.beta1) * g.w2;
      m2.w2 = config.beta2 * m2.w2 + (1.0 - config.beta2) * g.w2.cwiseAbs2();
      model.w2.array() -= config.learning_rate * (m1.w2.array() / c1) / ((m2.w2.array() / c2).sqrt() + config.epsilon);
      adam(model.b2, g.b2, m1.b2, m2.b2);
    }
    result.epoch_loss.push_back(loss(model, data, config.positive_weight));
  }
  return result;
}

FnnModel train(const FnnModel& model, const Dataset& data, const TrainConfig& config) {
  return train_with_history(model, data, config).model;
}

double grad_check(const FnnModel& model, const Dataset& batch, double epsilon, double positive_weight) {
  FnnModel analytic = gradient(model, batch, positive_weight);
  std::vector<double> analytic_flat;
  for_each_parameter(analytic, [&](double& v) { analytic_flat.push_back(v); });

  FnnModel probe = model;
  std::vector<double*> params;
  for_each_parameter(probe, [&](double& v) { params.push_back(&v); });

  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double original = *params[i];
    *params[i] = original + epsilon;
    const double up = loss(probe, batch, positive_weight);
    *params[i] = original - epsilon;
    const double down = loss(probe, batch, positive_weight);
    *params[i] = original;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double a = analytic_flat[i];
    const double rel = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-8);
    worst = std::max(worst, rel);
  }
  return worst;
}

void FnnModel::write(std::ostream& out, std::size_t embedding_dim) const {
  out << "fnn 1\n";
  out << "dims " << input_dim() << ' ' << hidden() << ' ' << embedding_dim << '\n';
  for (Eigen::Index r = 0; r < w1.rows(); ++r) {
    out << "w1";
    for (Eigen::Index c = 0; c < w1.cols(); ++c) out << ' ' << io::format_double(w1(r, c));
    out << '\n';
  }
  out << "b1 ";
  io::write_doubles(out, std::span<const double>(b1.data(), static_cast<std::size_t>(b1.size())));
  out << "\nw2 ";
  io::write_doubles(out, std::span<const double>(w2.data(), static_cast<std::size_t>(w2.size())));
  out << "\nb2 " << io::format_double(b2) << "\nend fnn\n";
}

FnnModel FnnModel::read(std::istream& in, std::optional<std::size_t> expected_embedding_dim) {
  io::LineReader reader(in, "fnn artifact");
  auto head = reader.expect("fnn", 2);
  if (head[1] != "1") reader.fail("unsupported fnn layout version " + head[1]);
  auto dims = reader.expect("dims", 4);
  const std::size_t input = std::stoul(dims[1]);
  const std::size_t hidden = std::stoul(dims[2]);
  const std::size_t embedding_dim = std::stoul(dims[3]);
  if (expected_embedding_dim && *expected_embedding_dim != embedding_dim)
    reader.fail("model was trained on " + std::to_string(embedding_dim) +
                "-dim embeddings but the configured provider yields " + std::to_string(*expected_embedding_dim));
  if (input == 0 || hidden == 0) reader.fail("zero dimension");
  FnnModel m;
  m.w1.resize(static_cast<Eigen::Index>(hidden), static_cast<Eigen::Index>(input));
  for (std::size_t r = 0; r < hidden; ++r) {
    auto f = reader.expect("w1");
    auto row = reader.doubles(f, 1, input);
    for (std::size_t c = 0; c < input; ++c) m.w1(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  auto b1 = reader.doubles(reader.expect("b1"), 1, hidden);
  m.b1 = Eigen::Map<Eigen::VectorXd>(b1.data(), static_cast<Eigen::Index>(hidden));
  auto w2 = reader.doubles(reader.expect("w2"), 1, hidden);
  m.w2 = Eigen::Map<Eigen::VectorXd>(w2.data(), static_cast<Eigen::Index>(hidden));
  m.b2 = reader.doubles(reader.expect("b2"), 1, 1)[0];
  reader.expect("end");
  return m;
}

}  // namespace assort
