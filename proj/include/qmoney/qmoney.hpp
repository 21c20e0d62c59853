#pragma once

// Umbrella header: the whole library.

#include "qmoney/rng.hpp"
#include "qmoney/linalg.hpp"
#include "qmoney/state.hpp"
#include "qmoney/density.hpp"
#include "qmoney/circuit.hpp"
#include "qmoney/gentle.hpp"
#include "qmoney/f2.hpp"
#include "qmoney/oracle.hpp"
#include "qmoney/simon.hpp"
#include "qmoney/amplify.hpp"
#include "qmoney/grover.hpp"
#include "qmoney/state_prep.hpp"
#include "qmoney/bomb.hpp"
#include "qmoney/hh.hpp"
#include "qmoney/product_state.hpp"
#include "qmoney/wiesner.hpp"
#include "qmoney/clone.hpp"
#include "qmoney/private_attacks.hpp"
#include "qmoney/hidden_subspace.hpp"
#include "qmoney/polynomial.hpp"
#include "qmoney/public_attacks.hpp"
#include "qmoney/full_scheme.hpp"
