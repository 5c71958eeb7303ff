#include "ct/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ct/errors.hpp"
#include "ct/parallel.hpp"

namespace ct {
namespace {

void check_variances(const std::vector<double>& sigma2, double sigma2_floor) {
    for (double s : sigma2) {
        if (!(s >= sigma2_floor)) {
            throw DegenerateVariance("variance " + std::to_string(s) + " below floor " +
                                     std::to_string(sigma2_floor));
        }
    }
}

inline double dist2(const LabImage& a, std::size_t i, const LabImage& b, std::size_t j) {
    double dL = a.L[i] - b.L[j];
    double da = a.a[i] - b.a[j];
    double db = a.b[i] - b.b[j];
    return dL * dL + da * da + db * db;
}

void require_state(const GmmState& state, const LabImage& y) {
    if (state.sigma2.size() != state.x.pixel_count()) {
        throw DimensionMismatch("sigma2 length does not match centroid count");
    }
    if (y.L.size() != y.pixel_count() || y.a.size() != y.pixel_count() ||
        y.b.size() != y.pixel_count()) {
        throw DimensionMismatch("example image planes are inconsistent");
    }
}

void require_reg_dims(const LabImage& x, const SourceLaplacian& delta_s) {
    if (delta_s.width() != x.width || delta_s.height() != x.height) {
        throw DimensionMismatch("source Laplacian dimensions do not match the centroids");
    }
}

}  // namespace

void TransferConfig::validate() const {
    if (!(sigma2_floor > 0.0)) throw ConfigInvalid("sigma2_floor must be positive");
    if (!(sigma2_init > sigma2_floor)) {
        throw ConfigInvalid("sigma2_init must exceed sigma2_floor");
    }
    if (!(mu >= 0.0)) throw ConfigInvalid("mu must be nonnegative");
    if (!(alpha > 0.0) || !(alpha <= 1.0)) throw ConfigInvalid("alpha must lie in (0, 1]");
    if (q_max < 1) throw ConfigInvalid("q_max must be at least 1");
    if (k_nn < 1) throw ConfigInvalid("k_nn must be at least 1");
    if (save_every < 1) throw ConfigInvalid("save_every must be at least 1");
    if (threads < 0) throw ConfigInvalid("threads must be nonnegative");
}

double nll(const GmmState& state, const LabImage& y, double sigma2_floor, int threads) {
    require_state(state, y);
    check_variances(state.sigma2, sigma2_floor);
    const std::size_t m_count = state.x.pixel_count();
    const std::size_t k_count = y.pixel_count();
    if (m_count == 0) throw DimensionMismatch("mixture has no components");

    // Per-component pieces of log((2*pi*sigma2)^{-3/2} exp(-d2/(2*sigma2))).
    std::vector<double> log_const(m_count), inv_two_s(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        log_const[m] = -1.5 * std::log(2.0 * std::numbers::pi * state.sigma2[m]);
        inv_two_s[m] = 0.5 / state.sigma2[m];
    }

    // Each example pixel's log-mixture value lands in its own slot; the final
    // reduction is serial so the result is identical for any thread count.
    std::vector<double> per_k(k_count);
    parallel_chunks(k_count, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> expo(m_count);
        for (std::size_t k = begin; k < end; ++k) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < m_count; ++m) {
                double e = log_const[m] - dist2(y, k, state.x, m) * inv_two_s[m];
                expo[m] = e;
                if (e > best) best = e;
            }
            double sum = 0.0;
            for (std::size_t m = 0; m < m_count; ++m) sum += std::exp(expo[m] - best);
            per_k[k] = best + std::log(sum);
        }
    });

    const double log_m = std::log(static_cast<double>(m_count));
    double total = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) total += log_m - per_k[k];
    return total;
}

PosteriorTable e_step(const GmmState& state, const LabImage& y, const NeighborIndex& index,
                      PosteriorMode mode, double sigma2_floor, int threads) {
    require_state(state, y);
    check_variances(state.sigma2, sigma2_floor);
    const std::size_t m_count = state.x.pixel_count();
    const std::size_t k_count = y.pixel_count();

    PosteriorTable table;
    if (mode == PosteriorMode::kTruncated) {
        if (index.centroid_count() != static_cast<int>(m_count)) {
            throw DimensionMismatch("neighbor index does not cover the centroids");
        }
        const int row_len = index.entries_per_list();
        table.row_len = row_len;
        table.idx.resize(m_count * row_len);
        table.p.resize(m_count * row_len);
        parallel_chunks(m_count, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t m = begin; m < end; ++m) {
                auto nbrs = index.query(static_cast<int>(m));
                double* p_row = table.p.data() + m * row_len;
                std::uint32_t* i_row = table.idx.data() + m * row_len;
                const double inv_two_s = 0.5 / state.sigma2[m];
                double best = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < row_len; ++j) {
                    i_row[j] = nbrs[j];
                    double e = -dist2(y, nbrs[j], state.x, m) * inv_two_s;
                    p_row[j] = e;
                    if (e > best) best = e;
                }
                double sum = 0.0;
                for (int j = 0; j < row_len; ++j) {
                    p_row[j] = std::exp(p_row[j] - best);
                    sum += p_row[j];
                }
                for (int j = 0; j < row_len; ++j) p_row[j] /= sum;
            }
        });
        return table;
    }

    // Full mode: every row lists all example pixels; normalization runs over
    // centroids for each fixed example pixel. Only the exponents enter, so
    // unequal variances are weighted exactly as the exponent form dictates.
    table.row_len = static_cast<int>(k_count);
    table.idx.resize(m_count * k_count);
    table.p.resize(m_count * k_count);
    parallel_chunks(m_count, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
            const double inv_two_s = 0.5 / state.sigma2[m];
            for (std::size_t k = 0; k < k_count; ++k) {
                table.idx[m * k_count + k] = static_cast<std::uint32_t>(k);
                table.p[m * k_count + k] = -dist2(y, k, state.x, m) * inv_two_s;
            }
        }
    });
    parallel_chunks(k_count, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < m_count; ++m) {
                best = std::max(best, table.p[m * k_count + k]);
            }
            double sum = 0.0;
            for (std::size_t m = 0; m < m_count; ++m) {
                sum += std::exp(table.p[m * k_count + k] - best);
            }
            double log_norm = best + std::log(sum);
            for (std::size_t m = 0; m < m_count; ++m) {
                double& p = table.p[m * k_count + k];
                p = std::exp(p - log_norm);
            }
        }
    });
    return table;
}

double objective_q(const GmmState& state, const LabImage& y, const PosteriorTable& post,
                   const SourceLaplacian& delta_s, const LaplacianKernel& kernel,
                   double mu_weight) {
    require_state(state, y);
    require_reg_dims(state.x, delta_s);
    const std::size_t m_count = state.x.pixel_count();
    if (post.rows() != m_count) throw DimensionMismatch("posterior table row count mismatch");
    check_variances(state.sigma2, 0.0);

    double data = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
        const double inv_two_s = 0.5 / state.sigma2[m];
        const double half_log_s = 0.5 * std::log(state.sigma2[m]);
        for (int j = 0; j < post.row_len; ++j) {
            std::size_t at = m * post.row_len + j;
            double p = post.p[at];
            data += p * (dist2(y, post.idx[at], state.x, m) * inv_two_s + half_log_s);
        }
    }

    double reg = 0.0;
    if (mu_weight != 0.0) {
        PlanarF64Image lap_x = convolve(state.x.planar(), kernel);
        for (int c = 0; c < 3; ++c) {
            for (std::size_t i = 0; i < m_count; ++i) {
                double r = lap_x.planes[c][i] - delta_s.planes.planes[c][i];
                reg += r * r;
            }
        }
        reg *= 0.5;
    }
    return data + mu_weight * reg;
}

std::vector<std::array<double, 3>> objective_gradient(const GmmState& state, const LabImage& y,
                                                      const PosteriorTable& post,
                                                      const SourceLaplacian& delta_s,
                                                      const LaplacianKernel& kernel,
                                                      double mu_weight) {
    require_state(state, y);
    require_reg_dims(state.x, delta_s);
    const std::size_t m_count = state.x.pixel_count();
    if (post.rows() != m_count) throw DimensionMismatch("posterior table row count mismatch");
    check_variances(state.sigma2, 0.0);

    std::vector<std::array<double, 3>> grad(m_count, {0.0, 0.0, 0.0});
    for (std::size_t m = 0; m < m_count; ++m) {
        const double inv_s = 1.0 / state.sigma2[m];
        for (int j = 0; j < post.row_len; ++j) {
            std::size_t at = m * post.row_len + j;
            std::size_t k = post.idx[at];
            double w = post.p[at] * inv_s;
            grad[m][0] += w * (state.x.L[m] - y.L[k]);
            grad[m][1] += w * (state.x.a[m] - y.a[k]);
            grad[m][2] += w * (state.x.b[m] - y.b[k]);
        }
    }

    if (mu_weight != 0.0) {
        // d/dX of (1/2)||A X - dS||^2 is A^T (A X - dS); the transpose differs
        // from the forward stencil at replicated borders.
        PlanarF64Image resid = convolve(state.x.planar(), kernel);
        for (int c = 0; c < 3; ++c) {
            for (std::size_t i = 0; i < m_count; ++i) {
                resid.planes[c][i] -= delta_s.planes.planes[c][i];
            }
        }
        PlanarF64Image back = convolve_adjoint(resid, kernel);
        for (std::size_t m = 0; m < m_count; ++m) {
            for (int c = 0; c < 3; ++c) grad[m][c] += mu_weight * back.planes[c][m];
        }
    }
    return grad;
}

LabImage m_step_centroids(const GmmState& state, const LabImage& y, const PosteriorTable& post,
                          const LaplacianKernel& kernel, const SourceLaplacian& delta_s,
                          double alpha, double mu, int threads) {
    require_state(state, y);
    const std::size_t m_count = state.x.pixel_count();
    if (post.rows() != m_count) throw DimensionMismatch("posterior table row count mismatch");

    PlanarF64Image lap_x;
    if (mu != 0.0) {
        require_reg_dims(state.x, delta_s);
        lap_x = convolve(state.x.planar(), kernel);
    }

    LabImage out(state.x.width, state.x.height);
    parallel_chunks(m_count, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
            double wsum = 0.0, sL = 0.0, sa = 0.0, sb = 0.0;
            for (int j = 0; j < post.row_len; ++j) {
                std::size_t at = m * post.row_len + j;
                std::size_t k = post.idx[at];
                double p = post.p[at];
                wsum += p;
                sL += p * (y.L[k] - state.x.L[m]);
                sa += p * (y.a[k] - state.x.a[m]);
                sb += p * (y.b[k] - state.x.b[m]);
            }
            double nL = state.x.L[m], na = state.x.a[m], nb = state.x.b[m];
            // A component with no posterior mass has nothing pulling it; its
            // centroid stays put.
            if (wsum > 0.0) {
                nL += alpha * (sL / wsum);
                na += alpha * (sa / wsum);
                nb += alpha * (sb / wsum);
            }
            if (mu != 0.0) {
                nL += mu * (lap_x.planes[0][m] - delta_s.planes.planes[0][m]);
                na += mu * (lap_x.planes[1][m] - delta_s.planes.planes[1][m]);
                nb += mu * (lap_x.planes[2][m] - delta_s.planes.planes[2][m]);
            }
            out.L[m] = nL;
            out.a[m] = na;
            out.b[m] = nb;
        }
    });
    return out;
}

std::vector<double> m_step_variances(const LabImage& x_new, const LabImage& y,
                                     const PosteriorTable& post, double sigma2_floor,
                                     int threads) {
    const std::size_t m_count = x_new.pixel_count();
    if (post.rows() != m_count) throw DimensionMismatch("posterior table row count mismatch");

    std::vector<double> sigma2(m_count, sigma2_floor);
    parallel_chunks(m_count, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
            double wsum = 0.0, acc = 0.0;
            for (int j = 0; j < post.row_len; ++j) {
                std::size_t at = m * post.row_len + j;
                double p = post.p[at];
                wsum += p;
                acc += p * dist2(y, post.idx[at], x_new, m);
            }
            if (wsum > 0.0) {
                sigma2[m] = std::max(sigma2_floor, acc / (3.0 * wsum));
            }
        }
    });
    return sigma2;
}

TransferResult run_transfer(const RgbImage& source, const RgbImage& example,
                            const TransferConfig& cfg, const FrameSink& sink,
                            PosteriorMode mode) {
    cfg.validate();
    if (source.pixel_count() == 0) throw DimensionMismatch("source image has no pixels");

    const LabImage s_norm = normalize_image(srgb_to_lab(source));
    const LabImage y_norm = normalize_image(srgb_to_lab(example));

    const NeighborIndex index = build_index(s_norm, y_norm, cfg.k_nn, cfg.threads);
    const SourceLaplacian delta_s = source_laplacian(s_norm);
    const LaplacianKernel kernel = default_kernel();

    GmmState state;
    state.x = s_norm;
    state.sigma2.assign(s_norm.pixel_count(), cfg.sigma2_init);
    state.q = 0;

    TransferResult result;
    result.nll_trace.reserve(cfg.q_max + 1);
    result.nll_trace.push_back(nll(state, y_norm, cfg.sigma2_floor, cfg.threads));

    for (int q = 1; q <= cfg.q_max; ++q) {
        PosteriorTable post =
            e_step(state, y_norm, index, mode, cfg.sigma2_floor, cfg.threads);
        LabImage x_new = m_step_centroids(state, y_norm, post, kernel, delta_s, cfg.alpha,
                                          cfg.mu, cfg.threads);
        state.sigma2 = m_step_variances(x_new, y_norm, post, cfg.sigma2_floor, cfg.threads);
        state.x = std::move(x_new);
        state.q = q;
        result.nll_trace.push_back(nll(state, y_norm, cfg.sigma2_floor, cfg.threads));
        if (sink && q % cfg.save_every == 0) {
            sink(lab_to_srgb(denormalize_image(state.x)), q);
        }
    }

    result.final_lab = denormalize_image(state.x);
    return result;
}

}  // namespace ct
