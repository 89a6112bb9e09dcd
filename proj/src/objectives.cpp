// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#include "mito/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mito/util.hpp"

namespace mito {

namespace {

// Row-normalized copy plus the original row norms. Throws on degenerate rows
// so that downstream cosine similarities are always well defined.
struct Normalized {
  Matrix unit;
  std::vector<double> norms;
};

Normalized normalize_rows(const Matrix& m, const char* what) {
  Normalized out;
  out.unit = Matrix(m.rows, m.cols);
  out.norms.resize(m.rows);
  for (size_t r = 0; r < m.rows; ++r) {
    double sq = 0.0;
    for (size_t c = 0; c < m.cols; ++c) sq += m.at(r, c) * m.at(r, c);
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(std::string(what) + " row " + std::to_string(r) +
                  " has zero or non-finite norm");
    }
    out.norms[r] = norm;
    for (size_t c = 0; c < m.cols; ++c) out.unit.at(r, c) = m.at(r, c) / norm;
  }
  return out;
}

double dot(const double* a, const double* b, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double log_sum_exp(const double* values, size_t n, size_t stride) {
  double hi = values[0];
  for (size_t i = 1; i < n; ++i) hi = std::max(hi, values[i * stride]);
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += std::exp(values[i * stride] - hi);
  return hi + std::log(s);
}

void validate_embedding_batch(const EmbeddingBatch& batch) {
  const Matrix& u = batch.image_embeddings;
  const Matrix& v = batch.text_embeddings;
  if (u.rows != v.rows || u.cols != v.cols) {
    throw Error("image and text embeddings must have identical shapes");
  }
  if (u.rows < 2) {
    throw Error("contrastive batch needs at least 2 pairs, got " +
                std::to_string(u.rows));
  }
  if (u.cols == 0) throw Error("embeddings must have at least one dimension");
  if (!(batch.temperature > 0.0)) {
    throw Error("temperature must be positive");
  }
}

// Scaled cosine similarities and both directions' log-partition terms.
struct SimilarityTables {
  Matrix s;                    // s[a][b] = cos(u_a, v_b) / temperature
  std::vector<double> row_lse;  // per image row
  std::vector<double> col_lse;  // per text column
};

SimilarityTables similarity_tables(const Normalized& u, const Normalized& v,
                                   double temperature) {
  const size_t n = u.unit.rows;
  const size_t d = u.unit.cols;
  SimilarityTables t;
  t.s = Matrix(n, n);
  t.row_lse.resize(n);
  t.col_lse.resize(n);
#pragma omp parallel for schedule(static)
  for (long a = 0; a < static_cast<long>(n); ++a) {
    for (size_t b = 0; b < n; ++b) {
      t.s.at(a, b) = dot(u.unit.row(a), v.unit.row(b), d) / temperature;
    }
    t.row_lse[a] = log_sum_exp(t.s.row(a), n, 1);
  }
#pragma omp parallel for schedule(static)
  for (long b = 0; b < static_cast<long>(n); ++b) {
    t.col_lse[b] = log_sum_exp(t.s.data.data() + b, n, n);
  }
  return t;
}

double infonce_from_tables(const SimilarityTables& t) {
  const size_t n = t.row_lse.size();
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    total += (t.row_lse[i] - t.s.at(i, i)) + (t.col_lse[i] - t.s.at(i, i));
  }
  return total / (2.0 * static_cast<double>(n));
}

// Pulls d(loss)/d(unit row) back through the row normalization:
// d_raw = (d_unit - (d_unit . unit) unit) / norm.
void unnormalize_gradient(const Normalized& n, const Matrix& d_unit,
                          Matrix& d_raw) {
  const size_t rows = n.unit.rows;
  const size_t cols = n.unit.cols;
  d_raw = Matrix(rows, cols);
#pragma omp parallel for schedule(static)
  for (long r = 0; r < static_cast<long>(rows); ++r) {
    const double radial = dot(d_unit.row(r), n.unit.row(r), cols);
    for (size_t c = 0; c < cols; ++c) {
      d_raw.at(r, c) =
          (d_unit.at(r, c) - radial * n.unit.at(r, c)) / n.norms[r];
    }
  }
}

}  // namespace

double clip_symmetric_infonce(const EmbeddingBatch& batch) {
  validate_embedding_batch(batch);
  const Normalized u = normalize_rows(batch.image_embeddings, "image");
  const Normalized v = normalize_rows(batch.text_embeddings, "text");
  return infonce_from_tables(similarity_tables(u, v, batch.temperature));
}

double clip_symmetric_infonce_with_grad(const EmbeddingBatch& batch,
                                        InfonceGradients& grads) {
  validate_embedding_batch(batch);
  const Normalized u = normalize_rows(batch.image_embeddings, "image");
  const Normalized v = normalize_rows(batch.text_embeddings, "text");
  const SimilarityTables t = similarity_tables(u, v, batch.temperature);
  const size_t n = t.row_lse.size();
  const size_t d = u.unit.cols;

  // d(loss)/d(s[a][b]) = (softmax_row_a(b) - delta + softmax_col_b(a) - delta)
  //                      / (2n)
  Matrix d_s(n, n);
#pragma omp parallel for schedule(static)
  for (long a = 0; a < static_cast<long>(n); ++a) {
    for (size_t b = 0; b < n; ++b) {
      const double row_p = std::exp(t.s.at(a, b) - t.row_lse[a]);
      const double col_p = std::exp(t.s.at(a, b) - t.col_lse[b]);
      const double delta = a == static_cast<long>(b) ? 2.0 : 0.0;
      d_s.at(a, b) = (row_p + col_p - delta) / (2.0 * static_cast<double>(n));
    }
  }

  Matrix d_u_unit(n, d);
  Matrix d_v_unit(n, d);
#pragma omp parallel for schedule(static)
  for (long a = 0; a < static_cast<long>(n); ++a) {
    for (size_t b = 0; b < n; ++b) {
      const double w = d_s.at(a, b) / batch.temperature;
      for (size_t c = 0; c < d; ++c) {
        d_u_unit.at(a, c) += w * v.unit.at(b, c);
      }
    }
  }
#pragma omp parallel for schedule(static)
  for (long b = 0; b < static_cast<long>(n); ++b) {
    for (size_t a = 0; a < n; ++a) {
      const double w = d_s.at(a, b) / batch.temperature;
      for (size_t c = 0; c < d; ++c) {
        d_v_unit.at(b, c) += w * u.unit.at(a, c);
      }
    }
  }

  unnormalize_gradient(u, d_u_unit, grads.d_image);
  unnormalize_gradient(v, d_v_unit, grads.d_text);
  return infonce_from_tables(t);
}

namespace {

void validate_token_batch(const TokenBatch& batch) {
  if (batch.token_log_probs.empty()) {
    throw Error("token batch is empty");
  }
  for (size_t i = 0; i < batch.token_log_probs.size(); ++i) {
    const auto& steps = batch.token_log_probs[i];
    if (steps.empty()) {
      throw Error("sample " + std::to_string(i) + " has no target tokens");
    }
    for (double lp : steps) {
      if (!(lp <= 0.0)) {
        throw Error("sample " + std::to_string(i) +
                    " has a log-probability above zero");
      }
    }
  }
}

}  // namespace

double autoregressive_nll(const TokenBatch& batch) {
  validate_token_batch(batch);
  const size_t n = batch.token_log_probs.size();
  std::vector<double> per_sample(n, 0.0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    double s = 0.0;
    for (double lp : batch.token_log_probs[i]) s -= lp;
    per_sample[i] = s;
  }
  double total = 0.0;
  for (double s : per_sample) total += s;
  return total;
}

double autoregressive_nll_mean_per_token(const TokenBatch& batch) {
  const double total = autoregressive_nll(batch);
  size_t steps = 0;
  for (const auto& sample : batch.token_log_probs) steps += sample.size();
  return total / static_cast<double>(steps);
}

TokenBatch autoregressive_nll_grad(const TokenBatch& batch) {
  validate_token_batch(batch);
  TokenBatch grads;
  grads.token_log_probs.reserve(batch.token_log_probs.size());
  for (const auto& sample : batch.token_log_probs) {
    grads.token_log_probs.emplace_back(sample.size(), -1.0);
  }
  return grads;
}

namespace {

void validate_siamese_batch(const SiameseBatch& batch) {
  const auto same_shape = [&](const Matrix& m) {
    return m.rows == batch.p1.rows && m.cols == batch.p1.cols;
  };
  if (!same_shape(batch.p2) || !same_shape(batch.z1) ||
      !same_shape(batch.z2)) {
    throw Error("all four siamese matrices must share one shape");
  }
  if (batch.p1.rows == 0 || batch.p1.cols == 0) {
    throw Error("siamese batch is empty");
  }
}

// Batch mean of -cos(p_i, z_i); optionally accumulates d/dp into d_p.
// z is a stop-gradient argument: nothing flows into it.
double negative_cosine(const Normalized& p, const Normalized& z, double weight,
                       Matrix* d_p) {
  const size_t n = p.unit.rows;
  const size_t d = p.unit.cols;
  std::vector<double> per_row(n, 0.0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    const double cosine = dot(p.unit.row(i), z.unit.row(i), d);
    per_row[i] = -cosine;
    if (d_p != nullptr) {
      const double scale = weight / static_cast<double>(n);
      for (size_t c = 0; c < d; ++c) {
        d_p->at(i, c) += scale *
                         -(z.unit.at(i, c) - cosine * p.unit.at(i, c)) /
                         p.norms[i];
      }
    }
  }
  double total = 0.0;
  for (double v : per_row) total += v;
  return total / static_cast<double>(n);
}

}  // namespace

double simsiam_loss(const SiameseBatch& batch) {
  validate_siamese_batch(batch);
  const Normalized p1 = normalize_rows(batch.p1, "p1");
  const Normalized p2 = normalize_rows(batch.p2, "p2");
  const Normalized z1 = normalize_rows(batch.z1, "z1");
  const Normalized z2 = normalize_rows(batch.z2, "z2");
  return 0.5 * negative_cosine(p1, z2, 0.5, nullptr) +
         0.5 * negative_cosine(p2, z1, 0.5, nullptr);
}

double simsiam_loss_with_grad(const SiameseBatch& batch,
                              SimsiamGradients& grads) {
  validate_siamese_batch(batch);
  const Normalized p1 = normalize_rows(batch.p1, "p1");
  const Normalized p2 = normalize_rows(batch.p2, "p2");
  const Normalized z1 = normalize_rows(batch.z1, "z1");
  const Normalized z2 = normalize_rows(batch.z2, "z2");
  grads.d_p1 = Matrix(batch.p1.rows, batch.p1.cols);
  grads.d_p2 = Matrix(batch.p1.rows, batch.p1.cols);
  grads.d_z1 = Matrix(batch.p1.rows, batch.p1.cols);
  grads.d_z2 = Matrix(batch.p1.rows, batch.p1.cols);
  return 0.5 * negative_cosine(p1, z2, 0.5, &grads.d_p1) +
         0.5 * negative_cosine(p2, z1, 0.5, &grads.d_p2);
}

namespace {

std::array<double, 3> unit3(const std::array<double, 3>& v) {
  const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(norm > 0.0)) throw Error("stain vector has zero norm");
  return {v[0] / norm, v[1] / norm, v[2] / norm};
}

}  // namespace

StainPair stain_separate(const ImageBuffer& rgb_tile,
                         const StainMatrix& stains) {
  if (rgb_tile.channels != 3) {
    throw Error("stain separation expects a 3-channel tile, got " +
                std::to_string(rgb_tile.channels));
  }
  const auto h = unit3(stains.hematoxylin);
  const auto e = unit3(stains.eosin);
  const double he = h[0] * e[0] + h[1] * e[1] + h[2] * e[2];
  const double det = 1.0 - he * he;
  if (std::abs(det) < 1e-12) {
    throw Error("stain vectors are collinear; cannot unmix");
  }

  StainPair out;
  out.hematoxylin = Plane(rgb_tile.width, rgb_tile.height);
  out.eosin = Plane(rgb_tile.width, rgb_tile.height);
  const size_t pixels =
      static_cast<size_t>(rgb_tile.width) * rgb_tile.height;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(pixels); ++i) {
    double od[3];
    for (int c = 0; c < 3; ++c) {
      const double v = rgb_tile.data[static_cast<size_t>(i) * 3 + c];
      od[c] = -std::log10((v + 1.0) / 256.0);
    }
    const double proj_h = od[0] * h[0] + od[1] * h[1] + od[2] * h[2];
    const double proj_e = od[0] * e[0] + od[1] * e[1] + od[2] * e[2];
    // Least squares against the two unit stain directions: solve the 2x2
    // Gram system [[1, he], [he, 1]] [a b]^T = [proj_h proj_e]^T.
    const double a = (proj_h - he * proj_e) / det;
    const double b = (proj_e - he * proj_h) / det;
    out.hematoxylin.values[i] = std::max(0.0, a);
    out.eosin.values[i] = std::max(0.0, b);
  }
  return out;
}

double mean_squared_error(const Plane& a, const Plane& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error("plane shapes differ");
  }
  if (a.values.empty()) throw Error("cannot average an empty plane");
  std::vector<double> per_row(a.height, 0.0);
#pragma omp parallel for schedule(static)
  for (long y = 0; y < a.height; ++y) {
    double s = 0.0;
    for (int x = 0; x < a.width; ++x) {
      const double diff = a.at(x, y) - b.at(x, y);
      s += diff * diff;
    }
    per_row[y] = s;
  }
  double total = 0.0;
  for (double s : per_row) total += s;
  return total / static_cast<double>(a.values.size());
}

}  // namespace mito
