#pragma once

#include "phonon_forge/dynamics.hpp"
#include "phonon_forge/error.hpp"
#include "phonon_forge/experiments.hpp"
#include "phonon_forge/fock.hpp"
#include "phonon_forge/laguerre.hpp"
#include "phonon_forge/measures.hpp"
#include "phonon_forge/mode_layout.hpp"
#include "phonon_forge/model.hpp"
#include "phonon_forge/operator.hpp"
#include "phonon_forge/result_table.hpp"
#include "phonon_forge/types.hpp"
