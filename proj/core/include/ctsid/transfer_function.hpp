#pragma once

#include "ctsid/polynomial.hpp"

#include <complex>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace ctsid {

/**
 * Proper continuous-time SISO transfer function num(p)/den(p).
 *
 * Both polynomials are stored with ascending coefficients.  The denominator
 * is normalized to unit constant term when the constant term is nonzero
 * (the convention used by the estimators), and to monic form otherwise
 * (integrating denominators such as plain 1/p).  Improper fractions are
 * rejected: filters with more zeros than poles never appear in the public
 * API.
 */
class CtTransferFunction {
public:
    // Zero system 0/1; placeholder for fill-in-style config structs.
    CtTransferFunction() : num_(), den_(std::vector<double>{1.0}) {}
    CtTransferFunction(CtPolynomial num, CtPolynomial den);

    const CtPolynomial& num() const { return num_; }
    const CtPolynomial& den() const { return den_; }

    int num_degree() const { return num_.degree(); }
    int den_degree() const { return den_.degree(); }

    bool strictly_proper() const { return num_.degree() < den_.degree(); }
    bool biproper() const { return num_.degree() == den_.degree(); }

    std::complex<double> operator()(const std::complex<double>& s) const;
    double dc_gain() const;

    std::vector<std::complex<double>> poles() const { return den_.roots(); }
    std::vector<std::complex<double>> zeros() const { return num_.roots(); }

    std::string to_string() const;

private:
    CtPolynomial num_, den_;
};

/**
 * Proper discrete-time SISO transfer function num(q)/den(q) at a fixed
 * sample period h.  Coefficients are stored descending in q and the
 * denominator is normalized to monic form.
 */
class DtTransferFunction {
public:
    DtTransferFunction(std::vector<double> num_descending, std::vector<double> den_descending,
                       double sample_period);

    const std::vector<double>& num() const { return num_; }
    const std::vector<double>& den() const { return den_; }
    double sample_period() const { return h_; }

    int num_degree() const { return static_cast<int>(num_.size()) - 1; }
    int den_degree() const { return static_cast<int>(den_.size()) - 1; }

    bool strictly_proper() const;
    bool biproper() const { return !strictly_proper(); }

    std::complex<double> operator()(const std::complex<double>& z) const;
    double dc_gain() const;  // value at z = 1

    std::vector<std::complex<double>> poles() const;
    std::vector<std::complex<double>> zeros() const;

    std::string to_string() const;

private:
    std::vector<double> num_, den_;
    double h_;
};

using AnyTransferFunction = std::variant<CtTransferFunction, DtTransferFunction>;

// Polynomial arithmetic on descending coefficient vectors.
std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> poly_add(const std::vector<double>& a, const std::vector<double>& b);

// JSON serialization.  Continuous coefficients are written ascending,
// discrete ones descending, exactly as stored; values round-trip bit-exact.
std::string transfer_function_to_json(const AnyTransferFunction& tf);
AnyTransferFunction transfer_function_from_json(const std::string& text);
void save_transfer_function(const std::filesystem::path& path, const AnyTransferFunction& tf);
AnyTransferFunction load_transfer_function(const std::filesystem::path& path);

}  // namespace ctsid
