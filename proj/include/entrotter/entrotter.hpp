#pragma once

#include "entrotter/pauli.hpp"
#include "entrotter/hamiltonian.hpp"
#include "entrotter/dense.hpp"
#include "entrotter/mps.hpp"
#include "entrotter/trotter.hpp"
#include "entrotter/bounds.hpp"
#include "entrotter/config.hpp"
#include "entrotter/records.hpp"
#include "entrotter/svg.hpp"
#include "entrotter/experiments.hpp"
