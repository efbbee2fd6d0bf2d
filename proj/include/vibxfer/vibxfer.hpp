#pragma once

#include "vibxfer/analytic.hpp"
#include "vibxfer/analyzer.hpp"
#include "vibxfer/delay_line.hpp"
#include "vibxfer/engine.hpp"
#include "vibxfer/error.hpp"
#include "vibxfer/fft.hpp"
#include "vibxfer/filters.hpp"
#include "vibxfer/params.hpp"
#include "vibxfer/pitch.hpp"
#include "vibxfer/runner.hpp"
#include "vibxfer/wav.hpp"
