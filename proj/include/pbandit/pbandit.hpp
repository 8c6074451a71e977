#ifndef PBANDIT_PBANDIT_HPP
#define PBANDIT_PBANDIT_HPP

#include "pbandit/adversarial.hpp"
#include "pbandit/errors.hpp"
#include "pbandit/evt.hpp"
#include "pbandit/format.hpp"
#include "pbandit/perturbation.hpp"
#include "pbandit/random.hpp"
#include "pbandit/reward_model.hpp"
#include "pbandit/stochastic.hpp"
#include "pbandit/theory.hpp"

#endif // PBANDIT_PBANDIT_HPP
