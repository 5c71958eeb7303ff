#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "ct/laplacian.hpp"
#include "ct/neighbor.hpp"

namespace ct {

// Everything the optimization loop initializes. sigma2_init and
// sigma2_floor are per-dimension variances in normalized Lab units; the
// default 5e-4 is 5.0 raw-Lab units rescaled by the L-channel factor 1/100^2.
struct TransferConfig {
    double sigma2_init = 5.0e-4;
    double mu = 0.003;
    double alpha = 0.1;
    int q_max = 50;
    int k_nn = 10;
    double sigma2_floor = 1e-6;
    int save_every = 1;
    int threads = 1;  // 0 = hardware concurrency

    // Throws ConfigInvalid when any invariant is violated.
    void validate() const;
};

enum class PosteriorMode {
    kTruncated,  // weights only over each centroid's neighbor list, row-normalized
    kFull,       // all M*K pairs, normalized over centroids for each example pixel
};

// Mutable optimizer state: centroids (one normalized-Lab pixel each),
// per-centroid variances, completed iteration count.
struct GmmState {
    LabImage x;
    std::vector<double> sigma2;
    int q = 0;
};

// Sparse responsibilities, one fixed-length row per centroid. In truncated
// mode row m lists the k_nn neighbors of centroid m and its weights sum to
// one; in full mode every row enumerates all K example pixels and the
// column sums over centroids are one.
struct PosteriorTable {
    int row_len = 0;
    std::vector<std::uint32_t> idx;  // example indices, rows of row_len
    std::vector<double> p;           // matching responsibilities

    std::size_t rows() const { return row_len == 0 ? 0 : idx.size() / row_len; }
};

// Negative log-likelihood of the example pixels under the current mixture,
// over all M components with full Gaussian normalization (d = 3). Used for
// convergence monitoring only.
double nll(const GmmState& state, const LabImage& y, double sigma2_floor, int threads = 1);

PosteriorTable e_step(const GmmState& state, const LabImage& y, const NeighborIndex& index,
                      PosteriorMode mode, double sigma2_floor, int threads = 1);

// Data term plus mu_weight times the Laplacian residual term, restricted to
// the table entries. Used for gradient checking and optional monitoring.
double objective_q(const GmmState& state, const LabImage& y, const PosteriorTable& post,
                   const SourceLaplacian& delta_s, const LaplacianKernel& kernel,
                   double mu_weight);

// Exact derivative of objective_q with respect to each centroid, including
// the padding-aware transpose of the Laplacian operator.
std::vector<std::array<double, 3>> objective_gradient(const GmmState& state, const LabImage& y,
                                                      const PosteriorTable& post,
                                                      const SourceLaplacian& delta_s,
                                                      const LaplacianKernel& kernel,
                                                      double mu_weight);

// One gradient step per centroid: the posterior-weighted pull toward the
// example pixels scaled by alpha, plus mu times the Laplacian residual.
// All neighbor reads use the previous iteration's centroids (simultaneous
// update).
LabImage m_step_centroids(const GmmState& state, const LabImage& y, const PosteriorTable& post,
                          const LaplacianKernel& kernel, const SourceLaplacian& delta_s,
                          double alpha, double mu, int threads = 1);

// Closed-form per-centroid variance with the d = 3 divisor, clamped to the
// floor.
std::vector<double> m_step_variances(const LabImage& x_new, const LabImage& y,
                                     const PosteriorTable& post, double sigma2_floor,
                                     int threads = 1);

// Receives each saved frame (already back in sRGB) and its iteration index.
using FrameSink = std::function<void(const RgbImage& frame, int q)>;

struct TransferResult {
    LabImage final_lab;              // denormalized CIELAB
    std::vector<double> nll_trace;   // entries for q = 0..q_max
};

// The full optimization loop: converts both images to normalized Lab,
// builds the neighbor index from the initial centroids, precomputes the
// source Laplacian, then alternates e_step / m_step_centroids /
// m_step_variances for q_max iterations. Frames are handed to the sink
// after every iteration divisible by save_every. Source and example may
// have different dimensions; frames always have the source's.
TransferResult run_transfer(const RgbImage& source, const RgbImage& example,
                            const TransferConfig& cfg, const FrameSink& sink,
                            PosteriorMode mode = PosteriorMode::kTruncated);

}  // namespace ct
