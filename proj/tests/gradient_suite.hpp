#pragma once

// Central finite-difference gradient checks for every differentiable
// operation, in 64-bit mode. Shared between the unit tests and the
// acceptance suite.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hfc/ops.hpp"
#include "hfc/rng.hpp"
#include "hfc/tensor.hpp"

namespace gradcheck {

using hfc::Rng;
using hfc::Tape;
using hfc::Tensor;
using hfc::TensorPtr;

inline constexpr double kPerturbation = 1e-5;

struct OpReport {
    int draws = 0;
    int elements_checked = 0;
    double max_rel_err = 0.0;
};

using SuiteReport = std::map<std::string, OpReport>;

inline TensorPtr<double> random_tensor(std::vector<int> shape, Rng& rng, double scale = 1.0) {
    auto t = hfc::make_tensor<double>(std::move(shape));
    for (int64_t i = 0; i < t->size(); ++i) t->data()[i] = scale * rng.normal();
    return t;
}

// Checks d(out . R)/d(input element) for every element of every listed input
// against a central difference of the projected forward value.
inline void check_case(const std::string& name,
                       const std::vector<TensorPtr<double>>& inputs,
                       const std::function<TensorPtr<double>(Tape<double>*)>& forward,
                       Rng& rng, SuiteReport& report) {
    Tape<double> tape;
    auto out = forward(&tape);
    std::vector<double> projection(static_cast<size_t>(out->size()));
    for (auto& v : projection) v = rng.normal();

    auto project = [&](const TensorPtr<double>& o) {
        double acc = 0.0;
        for (int64_t i = 0; i < o->size(); ++i) acc += o->data()[i] * projection[static_cast<size_t>(i)];
        return acc;
    };

    out->grad() = projection;
    tape.backward();

    OpReport& r = report[name];
    r.draws += 1;
    for (const auto& in : inputs) {
        const std::vector<double> analytic = in->grad_view().empty()
                                                 ? std::vector<double>(static_cast<size_t>(in->size()), 0.0)
                                                 : in->grad_view();
        for (int64_t i = 0; i < in->size(); ++i) {
            const double keep = in->data()[i];
            in->data()[i] = keep + kPerturbation;
            const double fp = project(forward(nullptr));
            in->data()[i] = keep - kPerturbation;
            const double fm = project(forward(nullptr));
            in->data()[i] = keep;
            const double numeric = (fp - fm) / (2.0 * kPerturbation);
            const double a = analytic[static_cast<size_t>(i)];
            const double rel = std::abs(a - numeric) /
                               std::max({1.0, std::abs(a), std::abs(numeric)});
            r.max_rel_err = std::max(r.max_rel_err, rel);
            r.elements_checked += 1;
        }
    }
}

// Runs `draws` random cases per operation. Returns per-op worst relative
// errors; the caller asserts against the tolerance.
inline SuiteReport run_gradient_suite(int draws, uint64_t seed = 20240811) {
    Rng rng(seed);
    SuiteReport report;

    for (int d = 0; d < draws; ++d) {
        // conv2d
        {
            const int N = 1 + rng.uniform_int(2), I = 1 + rng.uniform_int(3), O = 1 + rng.uniform_int(3);
            const int K = rng.uniform_int(2) == 0 ? 1 : 3;
            const int stride = 1 + rng.uniform_int(2);
            const int pad = rng.uniform_int(2);
            const int H = K + stride + rng.uniform_int(3), W = K + stride + rng.uniform_int(3);
            auto x = random_tensor({N, I, H, W}, rng);
            auto w = random_tensor({O, I, K, K}, rng, 0.5);
            auto b = random_tensor({O}, rng, 0.2);
            check_case("conv2d", {x, w, b},
                       [&](Tape<double>* t) { return hfc::ops::conv2d(x, w, b, stride, pad, t); }, rng,
                       report);
        }
        // batchnorm2d, train and eval modes
        {
            const int N = 2 + rng.uniform_int(2), C = 1 + rng.uniform_int(3);
            const int H = 2 + rng.uniform_int(2), W = 2 + rng.uniform_int(2);
            auto x = random_tensor({N, C, H, W}, rng);
            auto g = random_tensor({C}, rng, 0.5);
            auto bb = random_tensor({C}, rng, 0.5);
            for (int64_t i = 0; i < g->size(); ++i) g->data()[i] += 1.0;
            std::vector<double> rm(C), rv(C);
            for (int c = 0; c < C; ++c) {
                rm[c] = rng.normal();
                rv[c] = 0.5 + rng.uniform();
            }
            check_case("batchnorm2d_train", {x, g, bb},
                       [&](Tape<double>* t) {
                           auto rm_copy = rm;
                           auto rv_copy = rv;
                           return hfc::ops::batchnorm2d(x, g, bb, rm_copy, rv_copy, true, 0.1, 1e-5, t);
                       },
                       rng, report);
            check_case("batchnorm2d_eval", {x, g, bb},
                       [&](Tape<double>* t) {
                           auto rm_copy = rm;
                           auto rv_copy = rv;
                           return hfc::ops::batchnorm2d(x, g, bb, rm_copy, rv_copy, false, 0.1, 1e-5, t);
                       },
                       rng, report);
        }
        // silu
        {
            auto x = random_tensor({2, 3, 1 + rng.uniform_int(4)}, rng, 2.0);
            check_case("silu", {x}, [&](Tape<double>* t) { return hfc::ops::silu(x, t); }, rng, report);
        }
        // max_pool2d (window 2)
        {
            const int N = 1 + rng.uniform_int(2), C = 1 + rng.uniform_int(2);
            const int H = 2 * (1 + rng.uniform_int(2)), W = 2 * (1 + rng.uniform_int(2));
            auto x = random_tensor({N, C, H, W}, rng);
            check_case("max_pool2d", {x},
                       [&](Tape<double>* t) { return hfc::ops::max_pool2d(x, 2, t); }, rng, report);
        }
        // global_avg_pool2d
        {
            auto x = random_tensor({1 + rng.uniform_int(2), 1 + rng.uniform_int(3),
                                    1 + rng.uniform_int(3), 1 + rng.uniform_int(3)},
                                   rng);
            check_case("global_avg_pool2d", {x},
                       [&](Tape<double>* t) { return hfc::ops::global_avg_pool2d(x, t); }, rng, report);
        }
        // linear
        {
            const int B = 1 + rng.uniform_int(4), F = 1 + rng.uniform_int(5), U = 2 + rng.uniform_int(3);
            auto x = random_tensor({B, F}, rng);
            auto w = random_tensor({F, U}, rng, 0.5);
            auto b = random_tensor({U}, rng, 0.2);
            check_case("linear", {x, w, b},
                       [&](Tape<double>* t) { return hfc::ops::linear(x, w, b, t); }, rng, report);
        }
        // softmax_cross_entropy
        {
            const int B = 1 + rng.uniform_int(4), C = 2 + rng.uniform_int(4);
            auto x = random_tensor({B, C}, rng, 2.0);
            Tensor<double> y({B, C});
            for (int i = 0; i < B; ++i) y.data()[static_cast<int64_t>(i) * C + rng.uniform_int(C)] = 1.0;
            check_case("softmax_cross_entropy", {x},
                       [&](Tape<double>* t) { return hfc::ops::softmax_cross_entropy(x, y, t); }, rng,
                       report);
        }
        // add / concat_channels / slice_channels
        {
            auto a = random_tensor({2, 3}, rng);
            auto b = random_tensor({2, 3}, rng);
            check_case("add", {a, b}, [&](Tape<double>* t) { return hfc::ops::add(a, b, t); }, rng,
                       report);
        }
        {
            const int N = 1 + rng.uniform_int(2), H = 1 + rng.uniform_int(3), W = 1 + rng.uniform_int(3);
            auto a = random_tensor({N, 1 + rng.uniform_int(2), H, W}, rng);
            auto b = random_tensor({N, 1 + rng.uniform_int(2), H, W}, rng);
            std::vector<TensorPtr<double>> parts{a, b};
            check_case("concat_channels", {a, b},
                       [&](Tape<double>* t) { return hfc::ops::concat_channels(parts, t); }, rng, report);
        }
        {
            const int C = 3 + rng.uniform_int(3);
            auto x = random_tensor({2, C, 2, 2}, rng);
            const int c0 = rng.uniform_int(C - 1);
            const int c1 = c0 + 1 + rng.uniform_int(C - c0 - 1);
            check_case("slice_channels", {x},
                       [&](Tape<double>* t) { return hfc::ops::slice_channels(x, c0, c1, t); }, rng,
                       report);
        }
    }
    return report;
}

} // namespace gradcheck
