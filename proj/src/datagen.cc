// Copyright 2026 The fairdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairdp/datagen.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "fairdp/errors.h"

namespace fairdp {
namespace {

using Vec = std::vector<double>;

double Dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Random unit direction orthogonal to every vector in `basis` (which must be
// orthonormal). Returns the zero vector if the complement is empty.
Vec OrthogonalDirection(RngStream& rng, std::size_t dim,
                        const std::vector<Vec>& basis) {
  Vec v(dim);
  for (double& x : v) x = rng.NextNormal();
  for (const Vec& b : basis) {
    const double proj = Dot(v, b);
    for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * b[i];
  }
  const double norm = std::sqrt(Dot(v, v));
  if (norm < 1e-9) return Vec(dim, 0.0);
  for (double& x : v) x /= norm;
  return v;
}

void Standardize(LabeledBatch& train, LabeledBatch& test) {
  const std::size_t f = static_cast<std::size_t>(train.n_features);
  Vec mean(f, 0.0), var(f, 0.0);
  const double n = static_cast<double>(train.size());
  for (std::size_t r = 0; r < train.size(); ++r) {
    for (std::size_t j = 0; j < f; ++j) mean[j] += train.features[r * f + j];
  }
  for (double& m : mean) m /= n;
  for (std::size_t r = 0; r < train.size(); ++r) {
    for (std::size_t j = 0; j < f; ++j) {
      const double d = train.features[r * f + j] - mean[j];
      var[j] += d * d;
    }
  }
  Vec scale(f);
  for (std::size_t j = 0; j < f; ++j) {
    const double sd = std::sqrt(var[j] / n);
    scale[j] = sd > 0.0 ? 1.0 / sd : 1.0;
  }
  for (LabeledBatch* b : {&train, &test}) {
    for (std::size_t r = 0; r < b->size(); ++r) {
      for (std::size_t j = 0; j < f; ++j) {
        double& x = b->features[r * f + j];
        x = (x - mean[j]) * scale[j];
      }
    }
  }
}

std::vector<ClientShard> ShardsFromAssignment(
    const LabeledBatch& train, std::vector<std::vector<std::size_t>> rows) {
  std::vector<ClientShard> shards(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::sort(rows[i].begin(), rows[i].end());
    shards[i].client_id = static_cast<int>(i);
    shards[i].batch = train.Subset(rows[i]);
    shards[i].rows = std::move(rows[i]);
  }
  return shards;
}

std::vector<std::vector<std::size_t>> DirichletAssignment(
    const LabeledBatch& train, std::size_t k, double alpha, RngStream& rng) {
  int n_classes = 0;
  for (int y : train.labels) n_classes = std::max(n_classes, y + 1);
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t r = 0; r < train.size(); ++r) {
    by_class[train.labels[r]].push_back(r);
  }
  std::vector<std::vector<std::size_t>> assignment(k);
  for (auto& members : by_class) {
    Shuffle(members, rng);
    const std::vector<double> share = DirichletSample(rng, alpha, k);
    double cumulative = 0.0;
    std::size_t begin = 0;
    for (std::size_t client = 0; client < k; ++client) {
      cumulative += share[client];
      std::size_t end =
          client + 1 == k
              ? members.size()
              : std::min(members.size(),
                         static_cast<std::size_t>(std::llround(
                             cumulative * static_cast<double>(members.size()))));
      end = std::max(end, begin);
      assignment[client].insert(assignment[client].end(),
                                members.begin() + begin, members.begin() + end);
      begin = end;
    }
  }
  return assignment;
}

}  // namespace

void Validate(const DataSpec& spec) {
  if (spec.n_examples < 1) throw UsageError("n_examples must be >= 1");
  if (spec.n_features < 1) throw UsageError("n_features must be >= 1");
  if (spec.n_classes < 2) throw UsageError("n_classes must be >= 2");
  if (spec.n_groups < 2) throw UsageError("n_groups must be >= 2");
  if (!(spec.class_separation > 0.0) || !std::isfinite(spec.class_separation)) {
    throw UsageError("class_separation must be positive");
  }
  if (!(spec.group_correlation >= 0.0 && spec.group_correlation <= 1.0)) {
    throw UsageError("group_correlation must be in [0,1]");
  }
}

Dataset Generate(const DataSpec& spec, RngStream rng) {
  Validate(spec);
  const std::size_t f = static_cast<std::size_t>(spec.n_features);

  // Class means; the binary case uses two antipodal means.
  RngStream mean_rng = rng.Derive("class_means");
  std::vector<Vec> means(spec.n_classes, Vec(f, 0.0));
  std::vector<Vec> class_basis;
  const double radius = spec.class_separation / 2.0;
  const int n_directions = spec.n_classes == 2 ? 1 : spec.n_classes;
  for (int c = 0; c < n_directions; ++c) {
    Vec u(f);
    for (double& x : u) x = mean_rng.NextNormal();
    const double norm = std::sqrt(Dot(u, u));
    for (std::size_t j = 0; j < f; ++j) means[c][j] = radius * u[j] / norm;
  }
  if (spec.n_classes == 2) {
    for (std::size_t j = 0; j < f; ++j) means[1][j] = -means[0][j];
  }
  for (int c = 0; c < n_directions; ++c) {
    Vec b = means[c];
    for (const Vec& e : class_basis) {
      const double proj = Dot(b, e);
      for (std::size_t j = 0; j < f; ++j) b[j] -= proj * e[j];
    }
    const double norm = std::sqrt(Dot(b, b));
    if (norm < 1e-9) continue;
    for (double& x : b) x /= norm;
    class_basis.push_back(std::move(b));
  }

  RngStream group_rng = rng.Derive("group_shifts");
  std::vector<Vec> shifts(spec.n_groups);
  for (auto& shift : shifts) {
    shift = OrthogonalDirection(group_rng, f, class_basis);
    for (double& x : shift) x *= 2.0 * spec.group_correlation;
  }

  RngStream example_rng = rng.Derive("examples");
  LabeledBatch all;
  all.n_features = spec.n_features;
  all.features.reserve(static_cast<std::size_t>(spec.n_examples) * f);
  for (int i = 0; i < spec.n_examples; ++i) {
    const int y = static_cast<int>(example_rng.NextBelow(spec.n_classes));
    const int g = static_cast<int>(example_rng.NextBelow(spec.n_groups));
    for (std::size_t j = 0; j < f; ++j) {
      all.features.push_back(means[y][j] + shifts[g][j] +
                             example_rng.NextNormal());
    }
    all.labels.push_back(y);
    all.groups.push_back(g);
  }

  const std::size_t n_train = std::max<std::size_t>(
      1, static_cast<std::size_t>(spec.n_examples) * 4 / 5);
  std::vector<std::size_t> train_rows(n_train), test_rows;
  std::iota(train_rows.begin(), train_rows.end(), std::size_t{0});
  for (std::size_t r = n_train; r < all.size(); ++r) test_rows.push_back(r);

  Dataset out{all.Subset(train_rows), all.Subset(test_rows)};
  out.test.n_features = spec.n_features;
  Standardize(out.train, out.test);
  return out;
}

std::string_view ToString(PartitionKind kind) {
  switch (kind) {
    case PartitionKind::kIid:
      return "iid";
    case PartitionKind::kDirichletLabelSkew:
      return "dirichlet_label_skew";
  }
  return "unknown";
}

PartitionKind PartitionKindFromString(std::string_view name) {
  if (name == "iid") return PartitionKind::kIid;
  if (name == "dirichlet_label_skew") return PartitionKind::kDirichletLabelSkew;
  throw UsageError("unknown partition kind '" + std::string(name) + "'");
}

std::vector<ClientShard> Partition(const LabeledBatch& train, int k,
                                   const PartitionScheme& scheme,
                                   RngStream rng) {
  if (k < 1) throw UsageError("number of clients must be >= 1");
  const std::size_t n = train.size();
  const std::size_t clients = static_cast<std::size_t>(k);
  if (clients > n) {
    throw UsageError("cannot split " + std::to_string(n) + " examples across " +
                     std::to_string(k) + " clients");
  }
  if (clients == 1) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return ShardsFromAssignment(train, {std::move(rows)});
  }

  if (scheme.kind == PartitionKind::kIid) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    RngStream shuffle_rng = rng.Derive("iid");
    Shuffle(perm, shuffle_rng);
    std::vector<std::vector<std::size_t>> rows(clients);
    std::size_t begin = 0;
    for (std::size_t i = 0; i < clients; ++i) {
      const std::size_t size = n / clients + (i < n % clients ? 1 : 0);
      rows[i].assign(perm.begin() + begin, perm.begin() + begin + size);
      begin += size;
    }
    return ShardsFromAssignment(train, std::move(rows));
  }

  if (!(scheme.alpha > 0.0)) throw UsageError("dirichlet alpha must be > 0");
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    RngStream attempt_rng = rng.Derive("dirichlet", attempt);
    auto rows = DirichletAssignment(train, clients, scheme.alpha, attempt_rng);
    const bool all_nonempty = std::all_of(
        rows.begin(), rows.end(), [](const auto& r) { return !r.empty(); });
    if (all_nonempty) return ShardsFromAssignment(train, std::move(rows));
  }
  throw UsageError("dirichlet partition left a client empty after " +
                   std::to_string(kMaxAttempts) + " attempts");
}

ClientShard InjectBias(ClientShard shard, const BiasMode& mode, int n_classes,
                       RngStream rng) {
  if (IsBiased(shard.bias)) {
    throw UsageError("client " + std::to_string(shard.client_id) +
                     " is already biased");
  }
  if (const auto* flip = std::get_if<LabelFlip>(&mode)) {
    if (!(flip->p >= 0.0 && flip->p <= 1.0)) {
      throw UsageError("label flip probability must be in [0,1]");
    }
    for (std::size_t r = 0; r < shard.batch.size(); ++r) {
      if (shard.batch.groups[r] != flip->target_group) continue;
      if (rng.NextUniform() < flip->p) {
        int& y = shard.batch.labels[r];
        y = (y + 1) % n_classes;
      }
    }
    shard.bias = *flip;
    return shard;
  }
  const auto& scale = std::get<UpdateScale>(mode);
  if (!(scale.factor > 0.0) || !std::isfinite(scale.factor)) {
    throw UsageError("update scale factor must be positive");
  }
  shard.bias = scale;
  return shard;
}

void WriteCsv(const std::string& path, const LabeledBatch& batch) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  for (int j = 0; j < batch.n_features; ++j) out << 'f' << j << ',';
  out << "label,group\n";
  out << std::setprecision(17);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    for (double x : batch.Row(r)) out << x << ',';
    out << batch.labels[r] << ',' << batch.groups[r] << '\n';
  }
  if (!out) throw IoError(path, "write failed");
}

LabeledBatch ReadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path, "missing header");
  const int columns =
      static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 3) throw IoError(path, "header needs features, label, group");
  LabeledBatch batch;
  batch.n_features = columns - 2;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> cells;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(line.data() + start, line.data() + end, value);
      if (ec != std::errc() || ptr != line.data() + end) {
        throw IoError(path, "bad number on line " + std::to_string(line_no));
      }
      cells.push_back(value);
      start = end + 1;
    }
    if (static_cast<int>(cells.size()) != columns) {
      throw IoError(path, "wrong column count on line " +
                              std::to_string(line_no));
    }
    batch.features.insert(batch.features.end(), cells.begin(),
                          cells.end() - 2);
    batch.labels.push_back(static_cast<int>(cells[columns - 2]));
    batch.groups.push_back(static_cast<int>(cells[columns - 1]));
  }
  return batch;
}

}  // namespace fairdp
