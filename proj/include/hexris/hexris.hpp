#pragma once

#include "hexris/channel.hpp"
#include "hexris/common.hpp"
#include "hexris/config.hpp"
#include "hexris/control.hpp"
#include "hexris/feedback.hpp"
#include "hexris/geometry.hpp"
#include "hexris/io.hpp"
#include "hexris/mobility.hpp"
#include "hexris/schedule.hpp"
