#pragma once

#include "posheaf/error.hpp"
#include "posheaf/field.hpp"
#include "posheaf/matrix.hpp"
#include "posheaf/linalg.hpp"
#include "posheaf/poset.hpp"
#include "posheaf/classify.hpp"
#include "posheaf/sheaf.hpp"
#include "posheaf/cochain.hpp"
#include "posheaf/spectral.hpp"
#include "posheaf/nsd.hpp"
#include "posheaf/learn.hpp"
#include "posheaf/io.hpp"
