#include <algorithm>
#include <cctype>

#include "adcad/ann.hpp"
#include "adcad/svm.hpp"

namespace adcad {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

std::string to_string(KernelKind k) { return k == KernelKind::LINEAR ? "linear" : "gaussian"; }

KernelKind kernel_kind_from_string(const std::string& s) {
    const auto l = lower(s);
    if (l == "linear") return KernelKind::LINEAR;
    if (l == "gaussian" || l == "rbf") return KernelKind::GAUSSIAN;
    throw Error(ErrorKind::InvalidArgument, "unknown kernel '" + s + "'");
}

std::string to_string(Activation a) { return a == Activation::TANSIG ? "tansig" : "relu"; }

Activation activation_from_string(const std::string& s) {
    const auto l = lower(s);
    if (l == "tansig" || l == "tanh") return Activation::TANSIG;
    if (l == "relu") return Activation::RELU;
    throw Error(ErrorKind::InvalidArgument, "unknown activation '" + s + "'");
}

std::string to_string(Trainer t) { return t == Trainer::LM ? "lm" : "gdm"; }

Trainer trainer_from_string(const std::string& s) {
    const auto l = lower(s);
    if (l == "lm") return Trainer::LM;
    if (l == "gdm") return Trainer::GDM;
    throw Error(ErrorKind::InvalidArgument, "unknown trainer '" + s + "'");
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::MaxIters: return "max_iters";
        case StopReason::Goal: return "goal";
        case StopReason::MuMax: return "mu_max";
        case StopReason::Validation: return "validation";
    }
    return "max_iters";
}

}  // namespace adcad
