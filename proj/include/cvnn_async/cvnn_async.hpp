#pragma once

#include "split_complex.hpp"
#include "model.hpp"
#include "controller.hpp"
#include "criteria.hpp"
#include "dde_sim.hpp"
#include "scenario.hpp"
#include "commands.hpp"
