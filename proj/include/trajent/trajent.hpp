#pragma once

#include "trajent/absorption.hpp"
#include "trajent/chain.hpp"
#include "trajent/conditional.hpp"
#include "trajent/entropy.hpp"
#include "trajent/error.hpp"
#include "trajent/graph.hpp"
#include "trajent/io.hpp"
#include "trajent/oracle.hpp"
#include "trajent/stationary.hpp"
