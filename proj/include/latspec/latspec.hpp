#pragma once

#include "latspec/analysis.hpp"
#include "latspec/char_poly.hpp"
#include "latspec/complex_matrix.hpp"
#include "latspec/eigs.hpp"
#include "latspec/model.hpp"
#include "latspec/model_io.hpp"
#include "latspec/report_io.hpp"
#include "latspec/spectrum.hpp"
#include "latspec/sturm.hpp"
#include "latspec/symmetrize.hpp"
