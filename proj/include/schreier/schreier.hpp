#pragma once

#include "schreier/errors.hpp"
#include "schreier/graph.hpp"
#include "schreier/random.hpp"
#include "schreier/builders.hpp"
#include "schreier/coloring.hpp"
#include "schreier/dynamics.hpp"
#include "schreier/measures.hpp"
#include "schreier/io.hpp"
#include "schreier/version.hpp"
