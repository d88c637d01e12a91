__version__ = '1.0.0'
__app_name__ = 'baltrunc'
__description__ = 'Balanced truncation model reduction for LTI state-space systems'
__author__ = 'Bouchene Med Mehdi'
