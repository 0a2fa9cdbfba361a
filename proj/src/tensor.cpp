#include "qloop/tensor.hpp"

#include <algorithm>
#include <numeric>

#include "qloop/errors.hpp"

namespace qloop {

namespace {

using RowMajorMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t product(const std::vector<std::size_t>& dims) {
    std::size_t p = 1;
    for (std::size_t d : dims) p *= d;
    return p;
}

std::string dir_name(LegDir d) { return d == LegDir::Out ? "out" : "in"; }

void check_no_clash(const std::vector<Leg>& legs) {
    for (std::size_t i = 0; i < legs.size(); ++i)
        for (std::size_t j = i + 1; j < legs.size(); ++j)
            require(!(legs[i].label == legs[j].label && legs[i].dir == legs[j].dir),
                    "LabelClash",
                    "duplicate leg '" + legs[i].label + "' (" + dir_name(legs[i].dir) + ")");
}

} // namespace

Tensor::Tensor(std::vector<Leg> legs) : legs_(std::move(legs)) {
    for (const auto& l : legs_) require(l.dim >= 1, "LegMismatch", "leg dimension must be >= 1");
    check_no_clash(legs_);
    data_.assign(product(dims()), cplx(0.0));
}

Tensor::Tensor(std::vector<Leg> legs, std::vector<cplx> data)
    : legs_(std::move(legs)), data_(std::move(data)) {
    for (const auto& l : legs_) require(l.dim >= 1, "LegMismatch", "leg dimension must be >= 1");
    check_no_clash(legs_);
    require(data_.size() == product(dims()), "LegMismatch",
            "data length does not match the product of leg dimensions");
}

std::size_t Tensor::leg_index(const std::string& label, LegDir dir) const {
    std::size_t found = legs_.size();
    for (std::size_t i = 0; i < legs_.size(); ++i) {
        if (legs_[i].label == label && legs_[i].dir == dir) {
            require(found == legs_.size(), "LabelClash",
                    "ambiguous leg '" + label + "' (" + dir_name(dir) + ")");
            found = i;
        }
    }
    require(found < legs_.size(), "LegMismatch",
            "no leg '" + label + "' (" + dir_name(dir) + ")");
    return found;
}

bool Tensor::has_leg(const std::string& label, LegDir dir) const {
    for (const auto& l : legs_)
        if (l.label == label && l.dir == dir) return true;
    return false;
}

std::vector<std::size_t> Tensor::dims() const {
    std::vector<std::size_t> d(legs_.size());
    for (std::size_t i = 0; i < legs_.size(); ++i) d[i] = legs_[i].dim;
    return d;
}

std::vector<std::size_t> Tensor::strides() const {
    std::vector<std::size_t> s(legs_.size(), 1);
    for (std::size_t i = legs_.size(); i-- > 1;) s[i - 1] = s[i] * legs_[i].dim;
    return s;
}

cplx Tensor::at(const std::vector<std::size_t>& idx) const {
    const auto s = strides();
    require(idx.size() == legs_.size(), "LegMismatch", "index rank mismatch");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) flat += idx[i] * s[i];
    return data_[flat];
}

void Tensor::set(const std::vector<std::size_t>& idx, cplx v) {
    const auto s = strides();
    require(idx.size() == legs_.size(), "LegMismatch", "index rank mismatch");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) flat += idx[i] * s[i];
    data_[flat] = v;
}

Tensor permute_legs(const Tensor& t, const std::vector<std::size_t>& order) {
    require(order.size() == t.n_legs(), "LegMismatch", "permutation rank mismatch");
    std::vector<Leg> new_legs(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) new_legs[i] = t.legs()[order[i]];

    const auto old_strides = t.strides();
    std::vector<std::size_t> gather(order.size()); // stride of output axis i in input data
    for (std::size_t i = 0; i < order.size(); ++i) gather[i] = old_strides[order[i]];

    Tensor out(new_legs);
    const auto out_dims = out.dims();
    const std::size_t n = out.size();
    std::vector<std::size_t> idx(order.size(), 0);
    std::size_t src = 0;
    for (std::size_t flat = 0; flat < n; ++flat) {
        out[flat] = t[src];
        for (std::size_t ax = order.size(); ax-- > 0;) {
            if (++idx[ax] < out_dims[ax]) {
                src += gather[ax];
                break;
            }
            src -= gather[ax] * (out_dims[ax] - 1);
            idx[ax] = 0;
        }
    }
    return out;
}

Tensor compose(const Tensor& a, const Tensor& b,
               const std::vector<std::pair<std::string, std::string>>& pairing) {
    std::vector<std::size_t> a_paired, b_paired;
    for (const auto& [b_out, a_in] : pairing) {
        const std::size_t bi = b.leg_index(b_out, LegDir::Out);
        const std::size_t ai = a.leg_index(a_in, LegDir::In);
        require(b.legs()[bi].dim == a.legs()[ai].dim, "LegMismatch",
                "paired legs '" + b_out + "'/'" + a_in + "' have different dimensions");
        b_paired.push_back(bi);
        a_paired.push_back(ai);
    }

    std::vector<std::size_t> a_keep, b_keep;
    for (std::size_t i = 0; i < a.n_legs(); ++i)
        if (std::find(a_paired.begin(), a_paired.end(), i) == a_paired.end())
            a_keep.push_back(i);
    for (std::size_t i = 0; i < b.n_legs(); ++i)
        if (std::find(b_paired.begin(), b_paired.end(), i) == b_paired.end())
            b_keep.push_back(i);

    std::vector<Leg> result_legs;
    for (std::size_t i : a_keep) result_legs.push_back(a.legs()[i]);
    for (std::size_t i : b_keep) result_legs.push_back(b.legs()[i]);
    check_no_clash(result_legs);

    // a -> [keep..., paired...], b -> [paired..., keep...], then one matmul.
    std::vector<std::size_t> a_order = a_keep, b_order = b_paired;
    a_order.insert(a_order.end(), a_paired.begin(), a_paired.end());
    b_order.insert(b_order.end(), b_keep.begin(), b_keep.end());
    const Tensor ap = permute_legs(a, a_order);
    const Tensor bp = permute_legs(b, b_order);

    std::size_t contract_dim = 1;
    for (std::size_t i : a_paired) contract_dim *= a.legs()[i].dim;
    const std::size_t rows = ap.size() / std::max<std::size_t>(contract_dim, 1);
    const std::size_t cols = bp.size() / std::max<std::size_t>(contract_dim, 1);

    Eigen::Map<const RowMajorMatrix> ma(ap.data().data(), rows, contract_dim);
    Eigen::Map<const RowMajorMatrix> mb(bp.data().data(), contract_dim, cols);
    RowMajorMatrix mc = ma * mb;

    std::vector<cplx> out(mc.data(), mc.data() + mc.size());
    return Tensor(result_legs, std::move(out));
}

Tensor permutation_operator(std::size_t d1, std::size_t d2, const std::string& s1,
                            const std::string& s2) {
    Tensor p({Leg{s1, d2, LegDir::Out}, Leg{s2, d1, LegDir::Out}, Leg{s1, d1, LegDir::In},
              Leg{s2, d2, LegDir::In}});
    for (std::size_t i = 0; i < d1; ++i)
        for (std::size_t j = 0; j < d2; ++j) p.set({j, i, i, j}, cplx(1.0));
    return p;
}

Tensor partial_trace(const Tensor& t, const std::string& space) {
    const std::size_t io = t.leg_index(space, LegDir::Out);
    const std::size_t ii = t.leg_index(space, LegDir::In);
    require(t.legs()[io].dim == t.legs()[ii].dim, "LegMismatch",
            "traced pair '" + space + "' has unequal dimensions");
    const std::size_t d = t.legs()[io].dim;

    std::vector<Leg> legs;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < t.n_legs(); ++i) {
        if (i == io || i == ii) continue;
        keep.push_back(i);
        legs.push_back(t.legs()[i]);
    }

    Tensor out(legs);
    const auto out_dims = out.dims();
    const auto strides = t.strides();
    const std::size_t diag_stride = strides[io] + strides[ii];

    const std::size_t n = out.size();
    std::vector<std::size_t> idx(keep.size(), 0);
    std::size_t base = 0;
    for (std::size_t flat = 0; flat < n; ++flat) {
        cplx acc(0.0);
        for (std::size_t k = 0; k < d; ++k) acc += t[base + k * diag_stride];
        out[flat] = acc;
        for (std::size_t ax = keep.size(); ax-- > 0;) {
            if (++idx[ax] < out_dims[ax]) {
                base += strides[keep[ax]];
                break;
            }
            base -= strides[keep[ax]] * (out_dims[ax] - 1);
            idx[ax] = 0;
        }
    }
    return out;
}

Tensor partial_transpose(const Tensor& t, const std::vector<std::string>& spaces) {
    std::vector<std::size_t> order(t.n_legs());
    std::iota(order.begin(), order.end(), 0);
    for (const auto& s : spaces) {
        const std::size_t io = t.leg_index(s, LegDir::Out);
        const std::size_t ii = t.leg_index(s, LegDir::In);
        require(t.legs()[io].dim == t.legs()[ii].dim, "LegMismatch",
                "transposed pair '" + s + "' has unequal dimensions");
        std::swap(order[io], order[ii]);
    }
    Tensor swapped = permute_legs(t, order);
    return Tensor(t.legs(), std::move(swapped.data()));
}

Tensor relabel(const Tensor& t, const std::map<std::string, std::string>& renames) {
    std::vector<Leg> legs = t.legs();
    for (auto& l : legs) {
        const auto it = renames.find(l.label);
        if (it != renames.end()) l.label = it->second;
    }
    return Tensor(legs, std::vector<cplx>(t.data()));
}

Tensor tensor_product(const Tensor& a, const Tensor& b) {
    std::vector<Leg> legs = a.legs();
    legs.insert(legs.end(), b.legs().begin(), b.legs().end());
    check_no_clash(legs);
    std::vector<cplx> data(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) data[i * b.size() + j] = a[i] * b[j];
    return Tensor(legs, std::move(data));
}

Tensor conjugate(const Tensor& t) {
    std::vector<cplx> data(t.data());
    for (auto& v : data) v = std::conj(v);
    return Tensor(t.legs(), std::move(data));
}

Tensor operator_from_matrix(const std::vector<std::string>& spaces,
                            const std::vector<std::size_t>& dims, const Matrix& m) {
    require(spaces.size() == dims.size(), "LegMismatch", "spaces/dims size mismatch");
    std::vector<Leg> legs;
    for (std::size_t i = 0; i < spaces.size(); ++i)
        legs.push_back(Leg{spaces[i], dims[i], LegDir::Out});
    for (std::size_t i = 0; i < spaces.size(); ++i)
        legs.push_back(Leg{spaces[i], dims[i], LegDir::In});
    const std::size_t dim = product(dims);
    require(static_cast<std::size_t>(m.rows()) == dim &&
                static_cast<std::size_t>(m.cols()) == dim,
            "LegMismatch", "matrix shape does not match space dimensions");
    std::vector<cplx> data(dim * dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) data[r * dim + c] = m(r, c);
    return Tensor(legs, std::move(data));
}

Matrix operator_to_matrix(const Tensor& t, const std::vector<std::string>& spaces) {
    std::vector<std::size_t> order;
    std::size_t rows = 1, cols = 1;
    for (const auto& s : spaces) {
        const std::size_t i = t.leg_index(s, LegDir::Out);
        order.push_back(i);
        rows *= t.legs()[i].dim;
    }
    for (const auto& s : spaces) {
        const std::size_t i = t.leg_index(s, LegDir::In);
        order.push_back(i);
        cols *= t.legs()[i].dim;
    }
    require(order.size() == t.n_legs(), "LegMismatch",
            "operator_to_matrix must consume every leg");
    const Tensor p = permute_legs(t, order);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = p[r * cols + c];
    return m;
}

Tensor identity_operator(const std::vector<std::string>& spaces,
                         const std::vector<std::size_t>& dims) {
    const std::size_t dim = product(dims);
    return operator_from_matrix(spaces, dims, Matrix::Identity(dim, dim));
}

Tensor operator_mul(const Tensor& a, const Tensor& b) {
    std::vector<std::pair<std::string, std::string>> pairing;
    for (const auto& l : a.legs())
        if (l.dir == LegDir::In && b.has_leg(l.label, LegDir::Out))
            pairing.emplace_back(l.label, l.label);
    require(!pairing.empty(), "LegMismatch", "operator_mul found no shared spaces");
    return compose(a, b, pairing);
}

Tensor embed_operator(const Tensor& op, const std::vector<std::string>& spaces,
                      const std::vector<std::size_t>& dims) {
    require(spaces.size() == dims.size(), "LegMismatch", "spaces/dims size mismatch");
    std::vector<std::string> missing;
    std::vector<std::size_t> missing_dims;
    for (std::size_t i = 0; i < spaces.size(); ++i) {
        if (!op.has_leg(spaces[i], LegDir::Out)) {
            missing.push_back(spaces[i]);
            missing_dims.push_back(dims[i]);
        }
    }
    Tensor full = missing.empty() ? op : tensor_product(op, identity_operator(missing, missing_dims));

    std::vector<std::size_t> order;
    for (const auto& s : spaces) order.push_back(full.leg_index(s, LegDir::Out));
    for (const auto& s : spaces) order.push_back(full.leg_index(s, LegDir::In));
    require(order.size() == full.n_legs(), "LegMismatch",
            "embed_operator: operator has legs outside the target spaces");
    return permute_legs(full, order);
}

Tensor operator*(cplx s, const Tensor& t) {
    std::vector<cplx> data(t.data());
    for (auto& v : data) v *= s;
    return Tensor(t.legs(), std::move(data));
}

namespace {
Tensor elementwise(const Tensor& a, const Tensor& b, double sign) {
    require(a.legs() == b.legs(), "LegMismatch", "tensor arithmetic needs identical legs");
    std::vector<cplx> data(a.data());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += sign * b[i];
    return Tensor(a.legs(), std::move(data));
}
} // namespace

Tensor operator+(const Tensor& a, const Tensor& b) { return elementwise(a, b, 1.0); }
Tensor operator-(const Tensor& a, const Tensor& b) { return elementwise(a, b, -1.0); }

cplx trace_all(const Tensor& t) {
    Tensor cur = t;
    while (cur.n_legs() > 0) {
        bool progressed = false;
        for (const auto& l : cur.legs()) {
            if (l.dir == LegDir::Out && cur.has_leg(l.label, LegDir::In)) {
                cur = partial_trace(cur, l.label);
                progressed = true;
                break;
            }
        }
        require(progressed, "LegMismatch", "trace_all given a tensor with open legs");
    }
    return cur[0];
}

double frobenius_norm(const Tensor& t) {
    double acc = 0.0;
    for (const auto& v : t.data()) acc += std::norm(v);
    return std::sqrt(acc);
}

double rel_residual(const Tensor& a, const Tensor& b) {
    const double scale = std::max({frobenius_norm(a), frobenius_norm(b), 1e-300});
    return frobenius_norm(a - b) / scale;
}

double rel_residual(const Matrix& a, const Matrix& b) {
    const double scale = std::max({a.norm(), b.norm(), 1e-300});
    return (a - b).norm() / scale;
}

double identity_residual(const Matrix& m) {
    const Matrix id = Matrix::Identity(m.rows(), m.cols());
    return (m - id).norm() / id.norm();
}

double commutator_residual(const Matrix& a, const Matrix& b) {
    const double scale = std::max(a.norm() * b.norm(), 1e-300);
    return (a * b - b * a).norm() / scale;
}

nlohmann::json tensor_to_json(const Tensor& t) {
    nlohmann::json j;
    j["legs"] = nlohmann::json::array();
    for (const auto& l : t.legs())
        j["legs"].push_back({{"label", l.label}, {"dim", l.dim}, {"dir", dir_name(l.dir)}});
    auto data = nlohmann::json::array();
    for (const auto& v : t.data()) data.push_back({v.real(), v.imag()});
    j["data"] = std::move(data);
    return j;
}

Tensor tensor_from_json(const nlohmann::json& j) {
    std::vector<Leg> legs;
    for (const auto& l : j.at("legs")) {
        const std::string dir = l.at("dir").get<std::string>();
        require(dir == "in" || dir == "out", "ParseError", "leg dir must be 'in' or 'out'");
        legs.push_back(Leg{l.at("label").get<std::string>(), l.at("dim").get<std::size_t>(),
                           dir == "out" ? LegDir::Out : LegDir::In});
    }
    std::vector<cplx> data;
    for (const auto& v : j.at("data")) data.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    return Tensor(std::move(legs), std::move(data));
}

} // namespace qloop
