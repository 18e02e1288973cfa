#pragma once

#define KSLAB_VERSION "0.1.0"
