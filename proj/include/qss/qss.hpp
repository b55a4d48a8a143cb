#pragma once

#include "qss/adversary.hpp"
#include "qss/errors.hpp"
#include "qss/protocol_rules.hpp"
#include "qss/quantum_core.hpp"
#include "qss/random.hpp"
#include "qss/schemes.hpp"
#include "qss/session.hpp"
