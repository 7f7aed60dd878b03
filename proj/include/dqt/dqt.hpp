#ifndef DQT_DQT_HPP
#define DQT_DQT_HPP

#include "dqt/density.hpp"
#include "dqt/liouvillian.hpp"
#include "dqt/evolve.hpp"
#include "dqt/steady_state.hpp"
#include "dqt/serialize.hpp"
#include "dqt/gadgets.hpp"
#include "dqt/special.hpp"
#include "dqt/classical.hpp"
#include "dqt/recurrence.hpp"
#include "dqt/cutoff.hpp"
#include "dqt/transfer.hpp"

#endif  // DQT_DQT_HPP
