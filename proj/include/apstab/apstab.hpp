#pragma once

#include "apstab/apcalc.hpp"
#include "apstab/evolve.hpp"
#include "apstab/exact.hpp"
#include "apstab/frequency.hpp"
#include "apstab/harmonic.hpp"
#include "apstab/numeric.hpp"
#include "apstab/periodic.hpp"
#include "apstab/problem.hpp"
#include "apstab/report.hpp"
#include "apstab/scalar.hpp"
#include "apstab/semimodule.hpp"
#include "apstab/trigpoly.hpp"
#include "apstab/verdicts.hpp"
#include "apstab/version.hpp"
