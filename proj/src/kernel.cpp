#include "fbis/kernel.hpp"

namespace fbis {

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "gaussian") return KernelFamily::Gaussian;
    if (name == "epanechnikov") return KernelFamily::Epanechnikov;
    throw Error(ErrorCode::InvalidArgument, "unknown kernel family '" + name + "'");
}

std::string to_string(KernelFamily family) {
    return family == KernelFamily::Gaussian ? "gaussian" : "epanechnikov";
}

} // namespace fbis
