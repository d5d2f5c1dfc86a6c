#pragma once

#include "flowgru/activations.hpp"

// Independent high-precision evaluations of the activation formulas,
// computed with MPFR at 256 bits and rounded to double at the very end.
// These are deliberately written from the textbook formulas (1/(1+e^-x),
// ln(1+e^x), x*tanh(ln(1+e^x)), ...) with none of the library's
// rearrangements, so they are a genuinely separate path to the same values.
namespace precise {

double sigmoid(double x);
double tanh(double x);
double relu(double x);
double lrelu(double x, double alpha);
double elu(double x, double alpha);
double softplus(double x);
double mish(double x);

// Dispatch matching flowgru::activate for the fixed-formula kinds.
double eval(const flowgru::ActivationKind& act, double x);

}  // namespace precise
