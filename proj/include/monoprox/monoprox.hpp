#pragma once

#include "monoprox/admm.hpp"
#include "monoprox/composition.hpp"
#include "monoprox/config.hpp"
#include "monoprox/convex.hpp"
#include "monoprox/errors.hpp"
#include "monoprox/fista.hpp"
#include "monoprox/linalg.hpp"
#include "monoprox/matrix_io.hpp"
#include "monoprox/operators.hpp"
#include "monoprox/oracle.hpp"
#include "monoprox/postcomposition.hpp"
#include "monoprox/spec.hpp"
#include "monoprox/verify.hpp"
#include "monoprox/warped.hpp"
