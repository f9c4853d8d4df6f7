#pragma once

#include "lsms/array.hpp"
#include "lsms/errors.hpp"
#include "lsms/generator.hpp"
#include "lsms/harness.hpp"
#include "lsms/heuristic.hpp"
#include "lsms/io.hpp"
#include "lsms/lp.hpp"
#include "lsms/model.hpp"
#include "lsms/oracle.hpp"
#include "lsms/subproblems.hpp"
