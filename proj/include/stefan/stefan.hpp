#pragma once

#include "stefan/config.hpp"
#include "stefan/control.hpp"
#include "stefan/derivation.hpp"
#include "stefan/diagnostics.hpp"
#include "stefan/errors.hpp"
#include "stefan/kernels.hpp"
#include "stefan/numerics.hpp"
#include "stefan/observer.hpp"
#include "stefan/output.hpp"
#include "stefan/params.hpp"
#include "stefan/plant.hpp"
#include "stefan/scenario.hpp"
#include "stefan/trigger.hpp"
