#pragma once

#include <grc/bounds.hpp>
#include <grc/cli.hpp>
#include <grc/combinatorics.hpp>
#include <grc/core.hpp>
#include <grc/enumerate.hpp>
#include <grc/exact.hpp>
#include <grc/finish.hpp>
#include <grc/pack.hpp>
#include <grc/paths.hpp>
#include <grc/rng.hpp>
#include <grc/verify.hpp>
