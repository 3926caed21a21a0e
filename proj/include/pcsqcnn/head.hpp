#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pcsqcnn/prng.hpp"

namespace pcsqcnn {

/// Linear-softmax classifier: q = softmax(W p + b), W is M x D row-major.
struct HeadParams {
    int classes = 0;
    int dim = 0;
    std::vector<double> w;  // row-major M x D
    std::vector<double> b;  // M
};

/// Fan-in uniform initialization: every entry of W and b drawn i.i.d. from
/// Unif(-D^{-1/2}, +D^{-1/2}).
inline HeadParams init_head(int d_out, int m, rng::Stream& stream) {
    if (d_out < 1 || m < 2) throw std::invalid_argument("head: need D_out >= 1 and M >= 2");
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_out));
    HeadParams h{m, d_out, {}, {}};
    h.w.resize(static_cast<std::size_t>(m) * d_out);
    h.b.resize(static_cast<std::size_t>(m));
    for (double& v : h.w) v = stream.uniform(-bound, bound);
    for (double& v : h.b) v = stream.uniform(-bound, bound);
    return h;
}

inline std::vector<double> head_logits(const std::vector<double>& p, const HeadParams& h) {
    if (static_cast<int>(p.size()) != h.dim) throw std::invalid_argument("head: input size mismatch");
    std::vector<double> z(static_cast<std::size_t>(h.classes));
    for (int a = 0; a < h.classes; ++a) {
        double acc = h.b[static_cast<std::size_t>(a)];
        const double* row = h.w.data() + static_cast<std::size_t>(a) * h.dim;
        for (int i = 0; i < h.dim; ++i) acc += row[i] * p[static_cast<std::size_t>(i)];
        z[static_cast<std::size_t>(a)] = acc;
    }
    return z;
}

inline std::vector<double> softmax(std::vector<double> z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
}

inline std::vector<double> head_forward(const std::vector<double>& p, const HeadParams& h) {
    return softmax(head_logits(p, h));
}

/// -log q_c with natural log; softmax positivity keeps this finite.
inline double cross_entropy(const std::vector<double>& q, int label) {
    if (label < 0 || label >= static_cast<int>(q.size())) {
        throw std::invalid_argument("loss: label out of range");
    }
    return -std::log(q[static_cast<std::size_t>(label)]);
}

struct HeadGradient {
    std::vector<double> dw;  // M x D row-major
    std::vector<double> db;  // M
    std::vector<double> dp;  // D
    std::vector<double> q;   // class probabilities
    double loss = 0.0;
};

/// dL/dlogits = q - e_c; dL/dW = (q - e_c) p^T; dL/db = q - e_c;
/// dL/dp = W^T (q - e_c).
inline HeadGradient head_gradient(const std::vector<double>& p, const HeadParams& h, int label) {
    HeadGradient g;
    g.q = head_forward(p, h);
    g.loss = cross_entropy(g.q, label);
    std::vector<double> r = g.q;
    r[static_cast<std::size_t>(label)] -= 1.0;
    g.db = r;
    g.dw.resize(static_cast<std::size_t>(h.classes) * h.dim);
    g.dp.assign(static_cast<std::size_t>(h.dim), 0.0);
    for (int a = 0; a < h.classes; ++a) {
        const double ra = r[static_cast<std::size_t>(a)];
        const double* row = h.w.data() + static_cast<std::size_t>(a) * h.dim;
        double* grow = g.dw.data() + static_cast<std::size_t>(a) * h.dim;
        for (int i = 0; i < h.dim; ++i) {
            grow[i] = ra * p[static_cast<std::size_t>(i)];
            g.dp[static_cast<std::size_t>(i)] += ra * row[i];
        }
    }
    return g;
}

/// Largest singular value of W by power iteration on W^T W (for the
/// softmax-head gradient bound ||dL/dp||^2 <= 2 ||W||_op^2).
inline double head_operator_norm(const HeadParams& h, int iters = 200) {
    std::vector<double> v(static_cast<std::size_t>(h.dim));
    for (int i = 0; i < h.dim; ++i) {
        v[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(static_cast<double>(h.dim));
    }
    std::vector<double> wv(static_cast<std::size_t>(h.classes));
    double sigma2 = 0.0;
    for (int it = 0; it < iters; ++it) {
        for (int a = 0; a < h.classes; ++a) {
            double acc = 0.0;
            const double* row = h.w.data() + static_cast<std::size_t>(a) * h.dim;
            for (int i = 0; i < h.dim; ++i) acc += row[i] * v[static_cast<std::size_t>(i)];
            wv[static_cast<std::size_t>(a)] = acc;
        }
        std::vector<double> next(static_cast<std::size_t>(h.dim), 0.0);
        for (int a = 0; a < h.classes; ++a) {
            const double* row = h.w.data() + static_cast<std::size_t>(a) * h.dim;
            for (int i = 0; i < h.dim; ++i) {
                next[static_cast<std::size_t>(i)] += row[i] * wv[static_cast<std::size_t>(a)];
            }
        }
        double nn = 0.0;
        for (double x : next) nn += x * x;
        nn = std::sqrt(nn);
        if (nn == 0.0) return 0.0;
        sigma2 = nn;
        for (std::size_t i = 0; i < next.size(); ++i) v[i] = next[i] / nn;
    }
    return std::sqrt(sigma2);
}

}  // namespace pcsqcnn
