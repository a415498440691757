#pragma once

#include "pinney/asymptotics.hpp"
#include "pinney/error.hpp"
#include "pinney/exact.hpp"
#include "pinney/frequency.hpp"
#include "pinney/io.hpp"
#include "pinney/kostin.hpp"
#include "pinney/metrics.hpp"
#include "pinney/ode.hpp"
#include "pinney/stencil.hpp"
#include "pinney/transforms.hpp"
