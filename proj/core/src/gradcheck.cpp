#include "gasca/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace gasca {

double finite_diff_check(const std::function<double()>& loss_and_grad,
                         const std::vector<Parameter*>& params, double h) {
    std::vector<Tensor> analytic;
    analytic.reserve(params.size());
    loss_and_grad();
    for (const Parameter* p : params) analytic.push_back(p->grad);

    double worst = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Parameter* p = params[pi];
        for (std::int64_t i = 0; i < p->value.size(); ++i) {
            const double saved = p->value[i];
            p->value[i] = saved + h;
            const double up = loss_and_grad();
            p->value[i] = saved - h;
            const double down = loss_and_grad();
            p->value[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double a = analytic[pi][i];
            const double rel = std::fabs(a - numeric) / std::max(std::fabs(a) + std::fabs(numeric), 1e-6);
            worst = std::max(worst, rel);
        }
    }
    loss_and_grad();  // leave grads consistent with unperturbed values
    return worst;
}

}  // namespace gasca
