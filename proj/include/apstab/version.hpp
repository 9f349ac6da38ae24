#pragma once

#define APSTAB_VERSION "0.1.0"
