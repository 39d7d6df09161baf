#pragma once

#define FOCKPHASE_VERSION "0.1.0"
