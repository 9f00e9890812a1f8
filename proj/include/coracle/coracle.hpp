#pragma once

#include "coracle/adversary.hpp"
#include "coracle/class_file.hpp"
#include "coracle/errors.hpp"
#include "coracle/experiment.hpp"
#include "coracle/game.hpp"
#include "coracle/hypothesis.hpp"
#include "coracle/learner.hpp"
#include "coracle/littlestone.hpp"
#include "coracle/protocol.hpp"
#include "coracle/random.hpp"
#include "coracle/row_set.hpp"
