#include "flow714/tensor/tape.hpp"

#include <cmath>
#include <string>

#include "flow714/core/errors.hpp"
#include "flow714/core/kernels.hpp"

namespace flow714 {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                             b.shape_str());
    }
}

// Last-axis split used by softmax/layer_norm: rank-0 scalars are rejected.
void outer_last(const Tensor& t, int64_t& outer, int64_t& last, const char* op) {
    if (t.shape.empty() || t.shape.back() < 1) {
        throw DimensionError(std::string(op) + ": needs a last axis of size >= 1");
    }
    last = t.shape.back();
    outer = t.numel() / last;
}

constexpr double kGeluC = 0.7978845608028653558798921198687;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

double gelu_fwd(double x) {
    const double u = kGeluC * (x + kGeluA * x * x * x);
    return 0.5 * x * (1.0 + std::tanh(u));
}

double gelu_bwd(double x) {
    const double u = kGeluC * (x + kGeluA * x * x * x);
    const double t = std::tanh(u);
    const double du = kGeluC * (1.0 + 3.0 * kGeluA * x * x);
    return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
}

}  // namespace

Tape::Id Tape::push(Tensor value, bool requires_grad,
                    std::function<void(Tape&, const Tensor&)> backprop) {
    nodes_.push_back(Node{std::move(value), requires_grad, std::move(backprop)});
    return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::leaf(Tensor value) {
    check_finite(value, "leaf");
    const bool rg = value.requires_grad;
    const Id id = push(std::move(value), rg, nullptr);
    leaves_.push_back(id);
    return id;
}

void Tape::accumulate(Id input, const Tensor& g) {
    if (!needs_grad(input)) return;
    Tensor& slot = grads_[static_cast<size_t>(input)];
    if (slot.data.empty()) {
        slot = Tensor::zeros(value(input).shape);
    }
    for (size_t i = 0; i < slot.data.size(); ++i) slot.data[i] += g.data[i];
}

Tape::Id Tape::add(Id a, Id b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    require_same_shape(ta, tb, "add");
    Tensor out = ta;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += tb.data[i];
    check_finite(out, "add");
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [a, b](Tape& t, const Tensor& g) {
                    t.accumulate(a, g);
                    t.accumulate(b, g);
                });
}

Tape::Id Tape::sub(Id a, Id b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    require_same_shape(ta, tb, "sub");
    Tensor out = ta;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= tb.data[i];
    check_finite(out, "sub");
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [a, b](Tape& t, const Tensor& g) {
                    t.accumulate(a, g);
                    Tensor neg = g;
                    for (auto& x : neg.data) x = -x;
                    t.accumulate(b, neg);
                });
}

Tape::Id Tape::mul(Id a, Id b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    require_same_shape(ta, tb, "mul");
    Tensor out = ta;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= tb.data[i];
    check_finite(out, "mul");
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [a, b](Tape& t, const Tensor& g) {
                    if (t.needs_grad(a)) {
                        Tensor ga = g;
                        const Tensor& vb = t.value(b);
                        for (size_t i = 0; i < ga.data.size(); ++i) ga.data[i] *= vb.data[i];
                        t.accumulate(a, ga);
                    }
                    if (t.needs_grad(b)) {
                        Tensor gb = g;
                        const Tensor& va = t.value(a);
                        for (size_t i = 0; i < gb.data.size(); ++i) gb.data[i] *= va.data[i];
                        t.accumulate(b, gb);
                    }
                });
}

Tape::Id Tape::scale(Id a, double s) {
    Tensor out = value(a);
    for (auto& x : out.data) x *= s;
    check_finite(out, "scale");
    return push(std::move(out), needs_grad(a), [a, s](Tape& t, const Tensor& g) {
        Tensor ga = g;
        for (auto& x : ga.data) x *= s;
        t.accumulate(a, ga);
    });
}

Tape::Id Tape::matmul(Id a, Id b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.rank() != 2 || tb.rank() != 2 || ta.cols() != tb.rows()) {
        throw DimensionError("matmul: incompatible shapes " + ta.shape_str() + " x " +
                             tb.shape_str());
    }
    const int64_t m = ta.rows(), k = ta.cols(), n = tb.cols();
    Tensor out = Tensor::zeros({m, n});
    kernels::matmul(ta.data.data(), tb.data.data(), out.data.data(), m, k, n);
    check_finite(out, "matmul");
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [a, b, m, k, n](Tape& t, const Tensor& g) {
                    if (t.needs_grad(a)) {
                        // dA = dC * B^T
                        Tensor ga = Tensor::zeros({m, k});
                        kernels::matmul_nt(g.data.data(), t.value(b).data.data(), ga.data.data(),
                                           m, n, k);
                        t.accumulate(a, ga);
                    }
                    if (t.needs_grad(b)) {
                        // dB = A^T * dC
                        Tensor gb = Tensor::zeros({k, n});
                        kernels::matmul_tn(t.value(a).data.data(), g.data.data(), gb.data.data(),
                                           k, m, n);
                        t.accumulate(b, gb);
                    }
                });
}

Tape::Id Tape::matmul_nt(Id a, Id b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.rank() != 2 || tb.rank() != 2 || ta.cols() != tb.cols()) {
        throw DimensionError("matmul_nt: incompatible shapes " + ta.shape_str() + " x " +
                             tb.shape_str() + "^T");
    }
    const int64_t m = ta.rows(), k = ta.cols(), n = tb.rows();
    Tensor out = Tensor::zeros({m, n});
    kernels::matmul_nt(ta.data.data(), tb.data.data(), out.data.data(), m, k, n);
    check_finite(out, "matmul_nt");
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [a, b, m, k, n](Tape& t, const Tensor& g) {
                    if (t.needs_grad(a)) {
                        // dA = dC * B
                        Tensor ga = Tensor::zeros({m, k});
                        kernels::matmul(g.data.data(), t.value(b).data.data(), ga.data.data(), m,
                                        n, k);
                        t.accumulate(a, ga);
                    }
                    if (t.needs_grad(b)) {
                        // dB = dC^T * A
                        Tensor gb = Tensor::zeros({n, k});
                        kernels::matmul_tn(g.data.data(), t.value(a).data.data(), gb.data.data(),
                                           n, m, k);
                        t.accumulate(b, gb);
                    }
                });
}

Tape::Id Tape::add_rowvec(Id x, Id v) {
    const Tensor& tx = value(x);
    const Tensor& tv = value(v);
    if (tx.rank() != 2 || tv.numel() != tx.cols()) {
        throw DimensionError("add_rowvec: " + tx.shape_str() + " + vec of " +
                             std::to_string(tv.numel()));
    }
    const int64_t m = tx.rows(), n = tx.cols();
    Tensor out = tx;
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) out.data[i * n + j] += tv.data[j];
    check_finite(out, "add_rowvec");
    return push(std::move(out), needs_grad(x) || needs_grad(v),
                [x, v, m, n](Tape& t, const Tensor& g) {
                    t.accumulate(x, g);
                    if (t.needs_grad(v)) {
                        Tensor gv = Tensor::zeros(t.value(v).shape);
                        for (int64_t i = 0; i < m; ++i)
                            for (int64_t j = 0; j < n; ++j) gv.data[j] += g.data[i * n + j];
                        t.accumulate(v, gv);
                    }
                });
}

Tape::Id Tape::mul_rowvec(Id x, Id v) {
    const Tensor& tx = value(x);
    const Tensor& tv = value(v);
    if (tx.rank() != 2 || tv.numel() != tx.cols()) {
        throw DimensionError("mul_rowvec: " + tx.shape_str() + " * vec of " +
                             std::to_string(tv.numel()));
    }
    const int64_t m = tx.rows(), n = tx.cols();
    Tensor out = tx;
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) out.data[i * n + j] *= tv.data[j];
    check_finite(out, "mul_rowvec");
    return push(std::move(out), needs_grad(x) || needs_grad(v),
                [x, v, m, n](Tape& t, const Tensor& g) {
                    if (t.needs_grad(x)) {
                        Tensor gx = g;
                        const Tensor& vv = t.value(v);
                        for (int64_t i = 0; i < m; ++i)
                            for (int64_t j = 0; j < n; ++j) gx.data[i * n + j] *= vv.data[j];
                        t.accumulate(x, gx);
                    }
                    if (t.needs_grad(v)) {
                        Tensor gv = Tensor::zeros(t.value(v).shape);
                        const Tensor& vx = t.value(x);
                        for (int64_t i = 0; i < m; ++i)
                            for (int64_t j = 0; j < n; ++j)
                                gv.data[j] += g.data[i * n + j] * vx.data[i * n + j];
                        t.accumulate(v, gv);
                    }
                });
}

Tape::Id Tape::slice_cols(Id x, int64_t start, int64_t count) {
    const Tensor& tx = value(x);
    if (tx.rank() != 2 || start < 0 || count < 1 || start + count > tx.cols()) {
        throw DimensionError("slice_cols: bad range [" + std::to_string(start) + ", +" +
                             std::to_string(count) + ") of " + tx.shape_str());
    }
    const int64_t m = tx.rows(), n = tx.cols();
    Tensor out = Tensor::zeros({m, count});
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < count; ++j) out.data[i * count + j] = tx.data[i * n + start + j];
    return push(std::move(out), needs_grad(x),
                [x, start, count, m, n](Tape& t, const Tensor& g) {
                    Tensor gx = Tensor::zeros({m, n});
                    for (int64_t i = 0; i < m; ++i)
                        for (int64_t j = 0; j < count; ++j)
                            gx.data[i * n + start + j] = g.data[i * count + j];
                    t.accumulate(x, gx);
                });
}

Tape::Id Tape::slice_rows(Id x, int64_t start, int64_t count) {
    const Tensor& tx = value(x);
    if (tx.rank() != 2 || start < 0 || count < 1 || start + count > tx.rows()) {
        throw DimensionError("slice_rows: bad range [" + std::to_string(start) + ", +" +
                             std::to_string(count) + ") of " + tx.shape_str());
    }
    const int64_t n = tx.cols();
    Tensor out = Tensor::zeros({count, n});
    for (int64_t i = 0; i < count; ++i)
        for (int64_t j = 0; j < n; ++j) out.data[i * n + j] = tx.data[(start + i) * n + j];
    return push(std::move(out), needs_grad(x),
                [x, start, count, n](Tape& t, const Tensor& g) {
                    Tensor gx = Tensor::zeros(t.value(x).shape);
                    for (int64_t i = 0; i < count; ++i)
                        for (int64_t j = 0; j < n; ++j)
                            gx.data[(start + i) * n + j] = g.data[i * n + j];
                    t.accumulate(x, gx);
                });
}

Tape::Id Tape::concat_cols(const std::vector<Id>& parts) {
    if (parts.empty()) throw DimensionError("concat_cols: no inputs");
    const int64_t m = value(parts[0]).rows();
    int64_t total = 0;
    bool rg = false;
    for (Id p : parts) {
        const Tensor& tp = value(p);
        if (tp.rank() != 2 || tp.rows() != m) {
            throw DimensionError("concat_cols: row mismatch at " + tp.shape_str());
        }
        total += tp.cols();
        rg = rg || needs_grad(p);
    }
    Tensor out = Tensor::zeros({m, total});
    int64_t off = 0;
    for (Id p : parts) {
        const Tensor& tp = value(p);
        const int64_t n = tp.cols();
        for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < n; ++j) out.data[i * total + off + j] = tp.data[i * n + j];
        off += n;
    }
    std::vector<Id> captured = parts;
    return push(std::move(out), rg, [captured, m, total](Tape& t, const Tensor& g) {
        int64_t off = 0;
        for (Id p : captured) {
            const int64_t n = t.value(p).cols();
            if (t.needs_grad(p)) {
                Tensor gp = Tensor::zeros({m, n});
                for (int64_t i = 0; i < m; ++i)
                    for (int64_t j = 0; j < n; ++j) gp.data[i * n + j] = g.data[i * total + off + j];
                t.accumulate(p, gp);
            }
            off += n;
        }
    });
}

Tape::Id Tape::mean_rows(Id x) {
    const Tensor& tx = value(x);
    if (tx.rank() != 2) throw DimensionError("mean_rows: needs rank 2, got " + tx.shape_str());
    const int64_t m = tx.rows(), n = tx.cols();
    Tensor out = Tensor::zeros({1, n});
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) out.data[j] += tx.data[i * n + j];
    for (int64_t j = 0; j < n; ++j) out.data[j] /= static_cast<double>(m);
    check_finite(out, "mean_rows");
    return push(std::move(out), needs_grad(x), [x, m, n](Tape& t, const Tensor& g) {
        Tensor gx = Tensor::zeros({m, n});
        const double inv = 1.0 / static_cast<double>(m);
        for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < n; ++j) gx.data[i * n + j] = g.data[j] * inv;
        t.accumulate(x, gx);
    });
}

Tape::Id Tape::softmax(Id x) {
    const Tensor& tx = value(x);
    int64_t outer = 0, last = 0;
    outer_last(tx, outer, last, "softmax");
    Tensor out = tx;
    for (int64_t r = 0; r < outer; ++r) {
        double* row = out.data.data() + r * last;
        double mx = row[0];
        for (int64_t j = 1; j < last; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (int64_t j = 0; j < last; ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (int64_t j = 0; j < last; ++j) row[j] /= sum;
    }
    check_finite(out, "softmax");
    const Id out_id = push(std::move(out), needs_grad(x), nullptr);
    nodes_[static_cast<size_t>(out_id)].backprop = [x, out_id, outer, last](Tape& t,
                                                                            const Tensor& g) {
        const Tensor& y = t.value(out_id);
        Tensor gx = Tensor::zeros(t.value(x).shape);
        for (int64_t r = 0; r < outer; ++r) {
            const double* yr = y.data.data() + r * last;
            const double* gr = g.data.data() + r * last;
            double dot = 0.0;
            for (int64_t j = 0; j < last; ++j) dot += yr[j] * gr[j];
            for (int64_t j = 0; j < last; ++j) gx.data[r * last + j] = yr[j] * (gr[j] - dot);
        }
        t.accumulate(x, gx);
    };
    return out_id;
}

Tape::Id Tape::layer_norm(Id x, Id gain, Id bias, double eps) {
    const Tensor& tx = value(x);
    const Tensor& tg = value(gain);
    const Tensor& tb = value(bias);
    int64_t outer = 0, last = 0;
    outer_last(tx, outer, last, "layer_norm");
    if (eps <= 0.0) throw NumericalError("layer_norm: eps must be positive");
    if (tg.numel() != last || tb.numel() != last) {
        throw DimensionError("layer_norm: gain/bias must have " + std::to_string(last) +
                             " elements");
    }
    Tensor out = tx;
    for (int64_t r = 0; r < outer; ++r) {
        double* row = out.data.data() + r * last;
        double mean = 0.0;
        for (int64_t j = 0; j < last; ++j) mean += row[j];
        mean /= static_cast<double>(last);
        double var = 0.0;
        for (int64_t j = 0; j < last; ++j) {
            const double d = row[j] - mean;
            var += d * d;
        }
        var /= static_cast<double>(last);
        const double inv_std = 1.0 / std::sqrt(var + eps);
        for (int64_t j = 0; j < last; ++j) {
            row[j] = (row[j] - mean) * inv_std * tg.data[j] + tb.data[j];
        }
    }
    check_finite(out, "layer_norm");
    return push(
        std::move(out), needs_grad(x) || needs_grad(gain) || needs_grad(bias),
        [x, gain, bias, eps, outer, last](Tape& t, const Tensor& g) {
            const Tensor& vx = t.value(x);
            const Tensor& vg = t.value(gain);
            Tensor gx = Tensor::zeros(vx.shape);
            Tensor ggain = Tensor::zeros(t.value(gain).shape);
            Tensor gbias = Tensor::zeros(t.value(bias).shape);
            std::vector<double> xhat(static_cast<size_t>(last));
            for (int64_t r = 0; r < outer; ++r) {
                const double* xr = vx.data.data() + r * last;
                const double* gr = g.data.data() + r * last;
                double mean = 0.0;
                for (int64_t j = 0; j < last; ++j) mean += xr[j];
                mean /= static_cast<double>(last);
                double var = 0.0;
                for (int64_t j = 0; j < last; ++j) {
                    const double d = xr[j] - mean;
                    var += d * d;
                }
                var /= static_cast<double>(last);
                const double inv_std = 1.0 / std::sqrt(var + eps);
                double mean_gy = 0.0, mean_gyx = 0.0;
                for (int64_t j = 0; j < last; ++j) {
                    xhat[static_cast<size_t>(j)] = (xr[j] - mean) * inv_std;
                    const double gy = gr[j] * vg.data[j];
                    mean_gy += gy;
                    mean_gyx += gy * xhat[static_cast<size_t>(j)];
                }
                mean_gy /= static_cast<double>(last);
                mean_gyx /= static_cast<double>(last);
                for (int64_t j = 0; j < last; ++j) {
                    const double gy = gr[j] * vg.data[j];
                    gx.data[r * last + j] =
                        (gy - mean_gy - xhat[static_cast<size_t>(j)] * mean_gyx) * inv_std;
                    ggain.data[j] += gr[j] * xhat[static_cast<size_t>(j)];
                    gbias.data[j] += gr[j];
                }
            }
            t.accumulate(x, gx);
            t.accumulate(gain, ggain);
            t.accumulate(bias, gbias);
        });
}

Tape::Id Tape::gelu(Id x) {
    Tensor out = value(x);
    for (auto& v : out.data) v = gelu_fwd(v);
    check_finite(out, "gelu");
    return push(std::move(out), needs_grad(x), [x](Tape& t, const Tensor& g) {
        const Tensor& vx = t.value(x);
        Tensor gx = g;
        for (size_t i = 0; i < gx.data.size(); ++i) gx.data[i] *= gelu_bwd(vx.data[i]);
        t.accumulate(x, gx);
    });
}

Tape::Id Tape::film(Id x, Id scale_v, Id shift_v) {
    const Tensor& tx = value(x);
    const Tensor& ts = value(scale_v);
    const Tensor& th = value(shift_v);
    if (tx.rank() != 2 || ts.numel() != tx.cols() || th.numel() != tx.cols()) {
        throw DimensionError("film: x " + tx.shape_str() + " with scale/shift of " +
                             std::to_string(ts.numel()) + "/" + std::to_string(th.numel()));
    }
    const int64_t m = tx.rows(), n = tx.cols();
    Tensor out = tx;
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j)
            out.data[i * n + j] = tx.data[i * n + j] * (1.0 + ts.data[j]) + th.data[j];
    check_finite(out, "film");
    return push(std::move(out), needs_grad(x) || needs_grad(scale_v) || needs_grad(shift_v),
                [x, scale_v, shift_v, m, n](Tape& t, const Tensor& g) {
                    if (t.needs_grad(x)) {
                        Tensor gx = g;
                        const Tensor& vs = t.value(scale_v);
                        for (int64_t i = 0; i < m; ++i)
                            for (int64_t j = 0; j < n; ++j)
                                gx.data[i * n + j] *= (1.0 + vs.data[j]);
                        t.accumulate(x, gx);
                    }
                    if (t.needs_grad(scale_v)) {
                        Tensor gs = Tensor::zeros(t.value(scale_v).shape);
                        const Tensor& vx = t.value(x);
                        for (int64_t i = 0; i < m; ++i)
                            for (int64_t j = 0; j < n; ++j)
                                gs.data[j] += g.data[i * n + j] * vx.data[i * n + j];
                        t.accumulate(scale_v, gs);
                    }
                    if (t.needs_grad(shift_v)) {
                        Tensor gh = Tensor::zeros(t.value(shift_v).shape);
                        for (int64_t i = 0; i < m; ++i)
                            for (int64_t j = 0; j < n; ++j) gh.data[j] += g.data[i * n + j];
                        t.accumulate(shift_v, gh);
                    }
                });
}

Tape::Id Tape::mse_loss(Id pred, Id target) {
    const Tensor& tp = value(pred);
    const Tensor& tt = value(target);
    require_same_shape(tp, tt, "mse_loss");
    double acc = 0.0;
    for (size_t i = 0; i < tp.data.size(); ++i) {
        const double d = tp.data[i] - tt.data[i];
        acc += d * d;
    }
    const double inv_n = 1.0 / static_cast<double>(tp.numel());
    Tensor out = Tensor::scalar(acc * inv_n);
    check_finite(out, "mse_loss");
    return push(std::move(out), needs_grad(pred) || needs_grad(target),
                [pred, target, inv_n](Tape& t, const Tensor& g) {
                    const Tensor& vp = t.value(pred);
                    const Tensor& vt = t.value(target);
                    const double s = 2.0 * inv_n * g.data[0];
                    if (t.needs_grad(pred)) {
                        Tensor gp = Tensor::zeros(vp.shape);
                        for (size_t i = 0; i < gp.data.size(); ++i)
                            gp.data[i] = s * (vp.data[i] - vt.data[i]);
                        t.accumulate(pred, gp);
                    }
                    if (t.needs_grad(target)) {
                        Tensor gt = Tensor::zeros(vt.shape);
                        for (size_t i = 0; i < gt.data.size(); ++i)
                            gt.data[i] = -s * (vp.data[i] - vt.data[i]);
                        t.accumulate(target, gt);
                    }
                });
}

Tape::Id Tape::sum(Id x) {
    const Tensor& tx = value(x);
    double acc = 0.0;
    for (double v : tx.data) acc += v;
    Tensor out = Tensor::scalar(acc);
    check_finite(out, "sum");
    return push(std::move(out), needs_grad(x), [x](Tape& t, const Tensor& g) {
        Tensor gx = Tensor::full(t.value(x).shape, g.data[0]);
        t.accumulate(x, gx);
    });
}

Tape::Id Tape::reshape(Id x, std::vector<int64_t> shape) {
    const Tensor& tx = value(x);
    if (shape_numel(shape) != tx.numel()) {
        throw DimensionError("reshape: element count mismatch for " + tx.shape_str());
    }
    Tensor out(shape, tx.data);
    return push(std::move(out), needs_grad(x), [x](Tape& t, const Tensor& g) {
        Tensor gx(t.value(x).shape, g.data);
        t.accumulate(x, gx);
    });
}

Tape::GradMap Tape::backward(Id loss) {
    const Tensor& lv = value(loss);
    if (lv.numel() != 1) {
        throw DimensionError("backward: loss must be scalar, got " + lv.shape_str());
    }
    grads_.assign(nodes_.size(), Tensor{});
    grads_[static_cast<size_t>(loss)] = Tensor::full(lv.shape, 1.0);
    for (Id id = loss; id >= 0; --id) {
        const Node& node = nodes_[static_cast<size_t>(id)];
        if (!node.requires_grad || !node.backprop) continue;
        const Tensor& g = grads_[static_cast<size_t>(id)];
        if (g.data.empty()) continue;  // not reached by the loss
        node.backprop(*this, g);
    }
    GradMap result;
    for (Id leaf_id : leaves_) {
        if (!needs_grad(leaf_id)) continue;
        Tensor& g = grads_[static_cast<size_t>(leaf_id)];
        result[leaf_id] = g.data.empty() ? Tensor::zeros(value(leaf_id).shape) : std::move(g);
    }
    grads_.clear();
    return result;
}

}  // namespace flow714
