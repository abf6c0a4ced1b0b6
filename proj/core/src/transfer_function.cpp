#include "ctsid/transfer_function.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ctsid {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> trim_leading_zeros(std::vector<double> descending) {
    size_t first = 0;
    while (first + 1 < descending.size() && descending[first] == 0.0) ++first;
    descending.erase(descending.begin(), descending.begin() + static_cast<long>(first));
    return descending;
}

}  // namespace

CtTransferFunction::CtTransferFunction(CtPolynomial num, CtPolynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::invalid_argument("transfer function denominator is zero");
    if (num_.degree() > den_.degree()) {
        throw std::invalid_argument("improper transfer function: numerator degree exceeds denominator degree");
    }
    const double c0 = den_.constant_term();
    const double scale_ref = max_abs(den_.coeffs());
    // Unit constant term when possible, monic fallback for integrating
    // denominators (constant term ~ 0).
    const double scale = (std::abs(c0) > 1e-12 * scale_ref) ? c0 : den_.leading_coeff();
    num_ *= 1.0 / scale;
    den_ *= 1.0 / scale;
}

std::complex<double> CtTransferFunction::operator()(const std::complex<double>& s) const {
    return num_(s) / den_(s);
}

double CtTransferFunction::dc_gain() const {
    return num_.constant_term() / den_.constant_term();
}

std::string CtTransferFunction::to_string() const {
    return "(" + num_.to_string("p") + ") / (" + den_.to_string("p") + ")";
}

DtTransferFunction::DtTransferFunction(std::vector<double> num_descending,
                                       std::vector<double> den_descending, double sample_period)
    : num_(std::move(num_descending)), den_(std::move(den_descending)), h_(sample_period) {
    if (!(h_ > 0.0) || !std::isfinite(h_)) throw std::invalid_argument("sample period must be positive");
    den_ = trim_leading_zeros(std::move(den_));
    if (den_.empty() || max_abs(den_) == 0.0) throw std::invalid_argument("transfer function denominator is zero");
    if (num_.empty()) num_ = {0.0};
    num_ = trim_leading_zeros(std::move(num_));
    if (num_.size() > den_.size()) {
        throw std::invalid_argument("improper transfer function: numerator degree exceeds denominator degree");
    }
    const double lead = den_.front();
    for (double& x : den_) x /= lead;
    for (double& x : num_) x /= lead;
    for (double x : num_)
        if (!std::isfinite(x)) throw std::invalid_argument("coefficient is not finite");
    for (double x : den_)
        if (!std::isfinite(x)) throw std::invalid_argument("coefficient is not finite");
}

bool DtTransferFunction::strictly_proper() const {
    return num_.size() < den_.size() || num_.empty() || (num_.size() == den_.size() && num_.front() == 0.0);
}

std::complex<double> DtTransferFunction::operator()(const std::complex<double>& z) const {
    auto horner = [&z](const std::vector<double>& c) {
        std::complex<double> acc = 0.0;
        for (double x : c) acc = acc * z + x;
        return acc;
    };
    return horner(num_) / horner(den_);
}

double DtTransferFunction::dc_gain() const {
    const std::complex<double> g = (*this)(std::complex<double>(1.0, 0.0));
    return g.real();
}

namespace {

std::vector<std::complex<double>> descending_roots(const std::vector<double>& descending) {
    std::vector<double> ascending(descending.rbegin(), descending.rend());
    return CtPolynomial(std::move(ascending)).roots();
}

}  // namespace

std::vector<std::complex<double>> DtTransferFunction::poles() const { return descending_roots(den_); }
std::vector<std::complex<double>> DtTransferFunction::zeros() const { return descending_roots(num_); }

std::string DtTransferFunction::to_string() const {
    auto poly_str = [](const std::vector<double>& c) {
        std::vector<double> ascending(c.rbegin(), c.rend());
        return CtPolynomial(std::move(ascending)).to_string("q");
    };
    std::ostringstream os;
    os << "(" << poly_str(num_) << ") / (" << poly_str(den_) << "), h=" << h_;
    return os.str();
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

std::vector<double> poly_add(const std::vector<double>& a, const std::vector<double>& b) {
    // Descending coefficients align at the low-order end.
    std::vector<double> out(std::max(a.size(), b.size()), 0.0);
    const size_t na = a.size(), nb = b.size(), no = out.size();
    for (size_t i = 0; i < na; ++i) out[no - na + i] += a[i];
    for (size_t i = 0; i < nb; ++i) out[no - nb + i] += b[i];
    return out;
}

std::string transfer_function_to_json(const AnyTransferFunction& tf) {
    nlohmann::json j;
    if (std::holds_alternative<CtTransferFunction>(tf)) {
        const auto& g = std::get<CtTransferFunction>(tf);
        j["domain"] = "continuous";
        j["num"] = g.num().coeffs();
        j["den"] = g.den().coeffs();
    } else {
        const auto& g = std::get<DtTransferFunction>(tf);
        j["domain"] = "discrete";
        j["num"] = g.num();
        j["den"] = g.den();
        j["h"] = g.sample_period();
    }
    return j.dump(2);
}

AnyTransferFunction transfer_function_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("domain") || !j.contains("num") || !j.contains("den")) {
        throw std::invalid_argument("transfer function JSON requires keys: domain, num, den");
    }
    const std::string domain = j.at("domain").get<std::string>();
    const auto num = j.at("num").get<std::vector<double>>();
    const auto den = j.at("den").get<std::vector<double>>();
    if (domain == "continuous") {
        return CtTransferFunction(CtPolynomial(num), CtPolynomial(den));
    }
    if (domain == "discrete") {
        if (!j.contains("h")) throw std::invalid_argument("discrete transfer function JSON requires key: h");
        return DtTransferFunction(num, den, j.at("h").get<double>());
    }
    throw std::invalid_argument("transfer function domain must be \"continuous\" or \"discrete\"");
}

void save_transfer_function(const std::filesystem::path& path, const AnyTransferFunction& tf) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << transfer_function_to_json(tf) << "\n";
}

AnyTransferFunction load_transfer_function(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return transfer_function_from_json(buf.str());
}

}  // namespace ctsid
