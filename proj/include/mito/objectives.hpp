// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mito/image.hpp"

namespace mito {

// Dense row-major matrix of doubles. Rows are samples.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
  double* row(size_t r) { return data.data() + r * cols; }
  const double* row(size_t r) const { return data.data() + r * cols; }

  bool operator==(const Matrix&) const = default;
};

// Paired image/text embeddings with a softmax temperature. Rows need not be
// unit-norm; the loss normalizes internally.
struct EmbeddingBatch {
  Matrix image_embeddings;
  Matrix text_embeddings;
  double temperature = 1.0;
};

// Symmetric two-direction contrastive loss over cosine similarities:
// the matched pair is the positive among all N pairings in each direction,
// averaged over both directions and the batch. Throws on zero-norm rows,
// non-positive temperature, mismatched shapes, or batches smaller than 2.
double clip_symmetric_infonce(const EmbeddingBatch& batch);

struct InfonceGradients {
  Matrix d_image;
  Matrix d_text;
};

double clip_symmetric_infonce_with_grad(const EmbeddingBatch& batch,
                                        InfonceGradients& grads);

// Log-probabilities the model assigned to the realized target tokens, one
// inner vector per sample (padding already excluded). Entries must be <= 0
// and every sample must have at least one step.
struct TokenBatch {
  std::vector<std::vector<double>> token_log_probs;
};

// Canonical summed form: total negative log-likelihood over all samples and
// steps. The mean-per-token variant is for optimizer scaling only.
double autoregressive_nll(const TokenBatch& batch);
double autoregressive_nll_mean_per_token(const TokenBatch& batch);

// d(nll)/d(log_prob) is -1 at every counted step for the summed form.
TokenBatch autoregressive_nll_grad(const TokenBatch& batch);

// Two augmented views: predictor outputs p1/p2 and projector outputs z1/z2.
struct SiameseBatch {
  Matrix p1;
  Matrix p2;
  Matrix z1;
  Matrix z2;
};

// 0.5*D(p1, stopgrad(z2)) + 0.5*D(p2, stopgrad(z1)) with
// D = batch mean of -cos. Gradients never flow into the z arguments.
double simsiam_loss(const SiameseBatch& batch);

struct SimsiamGradients {
  Matrix d_p1;
  Matrix d_p2;
  Matrix d_z1;  // identically zero (stop-gradient)
  Matrix d_z2;  // identically zero (stop-gradient)
};

double simsiam_loss_with_grad(const SiameseBatch& batch,
                              SimsiamGradients& grads);

// Single-channel concentration map.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int w, int h) : width(w), height(h),
                        values(static_cast<size_t>(w) * h, 0.0) {}
  double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
};

// Hematoxylin / eosin absorbance directions (unit-normalized at use site).
struct StainMatrix {
  std::array<double, 3> hematoxylin{0.650, 0.704, 0.286};
  std::array<double, 3> eosin{0.072, 0.990, 0.105};
};

struct StainPair {
  Plane hematoxylin;
  Plane eosin;
};

// Optical density OD = -log10((v+1)/256) per channel, least-squares unmixing
// onto the two stain directions, concentrations clamped at zero. The
// (eosin -> hematoxylin) pair is the input/target of the stain-regression
// pretext, trained with mean squared error.
StainPair stain_separate(const ImageBuffer& rgb_tile,
                         const StainMatrix& stains = {});

double mean_squared_error(const Plane& a, const Plane& b);

}  // namespace mito
